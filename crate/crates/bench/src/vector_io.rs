//! Plain-text vectors: one float per line. Blank lines and lines starting
//! with `#` are skipped.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{BenchError, Result};

pub fn parse_vector(text: &str, origin: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            BenchError::parse(origin, i + 1, format!("expected one float, found '{line}'"))
        })?;
        if !v.is_finite() {
            return Err(BenchError::parse(
                origin,
                i + 1,
                format!("non-finite value '{line}'"),
            ));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_vector(&text, path)
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::with_capacity(v.len() * 24);
    for x in v {
        let _ = writeln!(s, "{x:.16e}");
    }
    s
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    std::fs::write(path, format_vector(v)).map_err(|e| BenchError::io(path, e))
}
