use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::settings::Settings;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Result table; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Table { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Rejects NaN or infinite values outside the leading `keys` columns.
    pub fn check_finite(&self, keys: usize) -> Result<(), CliError> {
        for row in &self.rows {
            for (j, v) in row.iter().enumerate().skip(keys) {
                if let Some(v) = v {
                    if !v.is_finite() {
                        return Err(CliError::Numerical(format!("column `{}` produced {v}", self.headers[j])));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.headers)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.map(format_number).unwrap_or_default()))?;
        }
        out.flush().map_err(|e| CliError::Io { path: PathBuf::from("<csv>"), source: e })?;
        Ok(())
    }
}

/// Plain decimal with 12 significant digits and trailing zeros trimmed;
/// scientific notation only for very small or very large magnitudes.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.prec$e}", prec = SIGNIFICANT_DIGITS - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Settings,
    pub seed: u64,
    pub version: String,
    pub threads_used: usize,
    pub started_unix_s: f64,
    pub wall_clock_s: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
        Ok(serde_json::from_reader(file)?)
    }
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_file(path: &Path, write: impl FnOnce(&mut File) -> Result<(), CliError>) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
    write(&mut f)?;
    f.sync_all().map_err(|e| CliError::Io { path: path.into(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 1e4), "6666.66666667");
        assert_eq!(format_number(1e-7), "1.00000000000e-7");
        assert_eq!(format_number(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_number(12345678901.26), "12345678901.3");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_number(std::f64::consts::PI * 1e-3), "0.00314159265359");
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let mut t = Table::new(vec!["a [s]".into(), "b, c".into()]);
        t.push(vec![Some(1.0), None]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a [s],\"b, c\"\n1,\n");
    }
}
