//! Data ingestion: one value per line or comma-separated, blank lines
//! ignored, strictly positive values required.

use crate::CliError;
use std::path::Path;

pub fn ingest(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_values(&text)
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        for token in line.split(',') {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            let v: f64 = token.parse().map_err(|_| {
                CliError::Config(format!("line {}: cannot parse '{token}' as a number", lineno + 1))
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!(
                    "line {}: values must be finite and > 0, got {v}",
                    lineno + 1
                )));
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(CliError::Config("input contains no values".into()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_and_commas() {
        let v = parse_values("1.5\n2.5, 3.5\n\n4\n").unwrap();
        assert_eq!(v, vec![1.5, 2.5, 3.5, 4.0]);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_values("a,b").unwrap_err();
        assert!(matches!(&err, CliError::Config(msg) if msg.contains("line 1")));
        let err = parse_values("1.0\n-3\n").unwrap_err();
        assert!(matches!(&err, CliError::Config(msg) if msg.contains("line 2")));
        assert!(parse_values("\n\n").is_err());
    }
}
