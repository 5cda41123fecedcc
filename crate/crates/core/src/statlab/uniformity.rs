use std::fmt;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::Histogram;
use crate::error::{Error, Result};

/// Significance level of every chi-squared acceptance band. A p-value passes
/// when it lies in `[SIGNIFICANCE, 1 - SIGNIFICANCE]`.
pub const SIGNIFICANCE: f64 = 1e-3;

/// Survival function `P(X >= statistic)` of chi-squared with `dof` degrees of freedom.
pub fn chi_squared_survival(statistic: f64, dof: u64) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Quantile of chi-squared with `dof` degrees of freedom.
pub fn chi_squared_quantile(probability: f64, dof: u64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(probability)
}

/// Goodness of fit of a histogram, or of a contingency table, against its null model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityReport {
    pub chi_squared: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
    /// Euclidean distance between the empirical and the null distribution.
    pub l2_distance: f64,
}

impl UniformityReport {
    /// Whether the p-value lies inside the two-sided band `[alpha, 1 - alpha]`.
    pub fn passes(&self, alpha: f64) -> bool {
        (alpha..=1.0 - alpha).contains(&self.p_value)
    }
}

impl fmt::Display for UniformityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chi_squared={:.4} dof={} p_value={:.6} l2_distance={:.6e}",
            self.chi_squared, self.degrees_of_freedom, self.p_value, self.l2_distance
        )
    }
}

/// Chi-squared test of `histogram` against the uniform distribution.
pub fn uniformity(histogram: &Histogram) -> Result<UniformityReport> {
    if histogram.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let n = histogram.len() as f64;
    let total = histogram.total() as f64;
    let expected = total / n;
    let (chi_squared, squared_distance) =
        histogram
            .counts()
            .iter()
            .fold((0.0, 0.0), |(chi, l2), &count| {
                let count = count as f64;
                (
                    chi + (count - expected).powi(2) / expected,
                    l2 + (count / total - 1.0 / n).powi(2),
                )
            });
    let degrees_of_freedom = histogram.len() as u64 - 1;
    Ok(UniformityReport {
        chi_squared,
        degrees_of_freedom,
        p_value: chi_squared_survival(chi_squared, degrees_of_freedom),
        l2_distance: squared_distance.sqrt(),
    })
}
