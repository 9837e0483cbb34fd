//! Writes experiment tables as CSV (17 significant digits) or JSON.

use crate::config::Format;
use crate::error::CliError;
use conic::sde_engine::{fmt17, PathSet};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

pub struct Output {
    dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), format, written: Vec::new() })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn path(&mut self, stem: &str) -> PathBuf {
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let p = self.dir.join(format!("{stem}.{ext}"));
        self.written.push(p.clone());
        p
    }

    /// A numeric table given as rows of values.
    pub fn table(&mut self, stem: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let text = match self.format {
            Format::Csv => {
                let mut s = header.join(",");
                s.push('\n');
                for r in rows {
                    s.push_str(&r.iter().map(|&v| fmt17(v)).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => json_table(header, rows).to_string(),
        };
        let path = self.path(stem);
        fs::write(path, text)?;
        Ok(())
    }

    /// A CSV document produced by one of the library writers; converted to
    /// the JSON table layout when JSON is requested.
    pub fn csv_document(&mut self, stem: &str, csv: &[u8]) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let path = self.path(stem);
                fs::write(path, csv)?;
                Ok(())
            }
            Format::Json => {
                let (header, rows) = parse_numeric_csv(std::str::from_utf8(csv).map_err(|e| CliError::Output(e.to_string()))?)?;
                self.table(stem, &header, &rows)
            }
        }
    }

    pub fn paths(&mut self, stem: &str, set: &PathSet) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let mut buf = Vec::new();
                set.write_csv(&mut buf)?;
                self.csv_document(stem, &buf)
            }
            Format::Json => {
                let text = set.to_json()?;
                let path = self.path(stem);
                fs::write(path, text)?;
                Ok(())
            }
        }
    }

    /// Rows of labelled text fields, for reports.
    pub fn records(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let text = match self.format {
            Format::Csv => {
                let mut s = header.join(",");
                s.push('\n');
                for r in rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let objs: Vec<Value> = rows
                    .iter()
                    .map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), Value::String(v.clone()))).collect()))
                    .collect();
                Value::Array(objs).to_string()
            }
        };
        let path = self.path(stem);
        fs::write(path, text)?;
        Ok(())
    }
}

fn json_table(header: &[String], rows: &[Vec<f64>]) -> Value {
    json!({ "columns": header, "rows": rows })
}

/// Header and numeric rows of a CSV document.
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().ok_or_else(|| CliError::Output("empty CSV".into()))?.split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Output(format!("bad CSV value {v:?}: {e}"))))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_lossless() {
        let dir = std::env::temp_dir().join(format!("conic-out-{}", std::process::id()));
        let mut out = Output::new(&dir, Format::Csv).unwrap();
        let rows = vec![vec![0.1, 1.0 / 3.0, -2.5e-300], vec![f64::MAX, 1e-17, 0.75]];
        let header: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        out.table("t", &header, &rows).unwrap();
        let text = fs::read_to_string(dir.join("t.csv")).unwrap();
        let (h, back) = parse_numeric_csv(&text).unwrap();
        assert_eq!(h, header);
        assert_eq!(back, rows);
        fs::remove_dir_all(dir).unwrap();
    }
}
