//! Record serialization shared by the subcommands.

use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One human-readable line per record.
    Text,
    /// Header line, then one row per record.
    Csv,
    /// One JSON object per line.
    #[value(name = "json-lines")]
    JsonLines,
}

/// Opens `path` for writing, or standard output when it is `None`.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display()))
            })?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_records<T, W>(out: W, format: Format, records: &[T]) -> Result<()>
where
    T: Serialize + Display,
    W: Write,
{
    match format {
        Format::Text => {
            let mut out = out;
            for record in records {
                writeln!(out, "{record}")?;
            }
            out.flush()?;
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for record in records {
                writer.serialize(record)?;
            }
            writer.flush()?;
        }
        Format::JsonLines => {
            let mut out = out;
            for record in records {
                serde_json::to_writer(&mut out, record)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Algorithm, BenchRow};

    fn rows() -> Vec<BenchRow> {
        vec![
            BenchRow {
                algorithm: Algorithm::FlipHash,
                n: 10,
                mean_ns: 4.5,
                p10_ns: 4.0,
                p90_ns: 5.25,
            },
            BenchRow {
                algorithm: Algorithm::JumpHash,
                n: 1000,
                mean_ns: 20.0,
                p10_ns: 19.0,
                p90_ns: 21.0,
            },
        ]
    }

    fn render(format: Format) -> String {
        let mut buf = Vec::new();
        write_records(&mut buf, format, &rows()).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_schema() {
        assert_eq!(
            render(Format::Csv),
            "algorithm,n,mean_ns,p10_ns,p90_ns\nfliphash,10,4.5,4.0,5.25\njumphash,1000,20.0,19.0,21.0\n"
        );
    }

    #[test]
    fn json_lines_mirror_csv_fields() {
        assert_eq!(
            render(Format::JsonLines),
            "{\"algorithm\":\"fliphash\",\"n\":10,\"mean_ns\":4.5,\"p10_ns\":4.0,\"p90_ns\":5.25}\n\
             {\"algorithm\":\"jumphash\",\"n\":1000,\"mean_ns\":20.0,\"p10_ns\":19.0,\"p90_ns\":21.0}\n"
        );
    }

    #[test]
    fn text_lines() {
        assert_eq!(render(Format::Text).lines().count(), 2);
    }

    #[test]
    fn empty_csv_has_no_rows() {
        let mut buf = Vec::new();
        write_records::<BenchRow, _>(&mut buf, Format::Csv, &[]).unwrap();
        assert!(buf.is_empty());
    }
}
