//! Matrix Market reader and writer for dense symmetric matrices.
//!
//! Reads `coordinate` and `array` storage with `real` or `integer` fields.
//! Under the `symmetric` qualifier only the lower triangle may appear and the
//! upper triangle is mirrored from it. `general` files are read in full and
//! must already be symmetric.

use std::fmt::Write as _;
use std::path::Path;

use hd_core::{Matrix, SpdMatrix};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Storage {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    Symmetric,
    General,
}

/// Reads a Matrix Market file and validates it as SPD.
pub fn read_matrix_market(path: &Path) -> Result<SpdMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    let m = parse_matrix_market(&text, path)?;
    Ok(SpdMatrix::new(m)?)
}

/// Parses Matrix Market text; `origin` only labels error messages.
pub fn parse_matrix_market(text: &str, origin: &Path) -> Result<Matrix> {
    let err = |line: usize, msg: String| BenchError::parse(origin, line, msg);
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (lineno, banner) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(
            lineno,
            format!(
                "expected '%%MatrixMarket matrix <format> <field> <symmetry>', found '{banner}'"
            ),
        ));
    }
    let storage = match tokens[2].as_str() {
        "coordinate" => Storage::Coordinate,
        "array" => Storage::Array,
        other => return Err(err(lineno, format!("unsupported format '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(err(lineno, format!("unsupported field '{other}'"))),
    }
    let symmetry = match tokens[4].as_str() {
        "symmetric" => Symmetry::Symmetric,
        "general" => Symmetry::General,
        other => return Err(err(lineno, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body
        .next()
        .ok_or_else(|| err(lineno, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| err(size_line, format!("bad size entry '{t}'")))
        })
        .collect::<Result<_>>()?;
    let expected_fields = if storage == Storage::Coordinate { 3 } else { 2 };
    if dims.len() != expected_fields {
        return Err(err(
            size_line,
            format!("size line needs {expected_fields} integers"),
        ));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(err(
            size_line,
            format!("matrix is {rows}x{cols}, not square"),
        ));
    }
    if rows == 0 {
        return Err(err(size_line, "matrix has no rows".into()));
    }
    let n = rows;
    let mut a = Matrix::zeros(n, n);

    let parse_value = |line: usize, t: &str| -> Result<f64> {
        let v: f64 = t
            .parse()
            .map_err(|_| err(line, format!("bad value '{t}'")))?;
        if !v.is_finite() {
            return Err(err(line, format!("non-finite value '{t}'")));
        }
        Ok(v)
    };

    match storage {
        Storage::Coordinate => {
            let nnz = dims[2];
            let mut seen = vec![false; n * n];
            let mut count = 0;
            for (line, entry) in body {
                let t: Vec<&str> = entry.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(err(
                        line,
                        format!("expected 'row col value', found '{entry}'"),
                    ));
                }
                let index = |s: &str| -> Result<usize> {
                    match s.parse::<usize>() {
                        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                        _ => Err(err(line, format!("index '{s}' outside 1..={n}"))),
                    }
                };
                let (i, j) = (index(t[0])?, index(t[1])?);
                let v = parse_value(line, t[2])?;
                if symmetry == Symmetry::Symmetric && j > i {
                    return Err(err(
                        line,
                        format!(
                            "entry ({}, {}) lies above the diagonal in a symmetric file",
                            i + 1,
                            j + 1
                        ),
                    ));
                }
                if std::mem::replace(&mut seen[i * n + j], true) {
                    return Err(err(line, format!("duplicate entry ({}, {})", i + 1, j + 1)));
                }
                a[(i, j)] = v;
                if symmetry == Symmetry::Symmetric {
                    a[(j, i)] = v;
                }
                count += 1;
                if count > nnz {
                    return Err(err(line, format!("more than the declared {nnz} entries")));
                }
            }
            if count < nnz {
                return Err(err(
                    size_line,
                    format!("declared {nnz} entries, found {count}"),
                ));
            }
        }
        Storage::Array => {
            // column-major; symmetric files list the lower triangle only
            let slots: Vec<(usize, usize)> = match symmetry {
                Symmetry::Symmetric => (0..n).flat_map(|j| (j..n).map(move |i| (i, j))).collect(),
                Symmetry::General => (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).collect(),
            };
            let mut slot = slots.iter();
            for (line, entry) in body {
                for t in entry.split_whitespace() {
                    let &(i, j) = slot.next().ok_or_else(|| {
                        err(
                            line,
                            format!("more than the expected {} values", slots.len()),
                        )
                    })?;
                    let v = parse_value(line, t)?;
                    a[(i, j)] = v;
                    if symmetry == Symmetry::Symmetric {
                        a[(j, i)] = v;
                    }
                }
            }
            if slot.next().is_some() {
                return Err(err(size_line, format!("expected {} values", slots.len())));
            }
        }
    }
    if symmetry == Symmetry::General {
        let (i, j, diff) = a.asymmetry();
        if diff > hd_core::linalg::SPD_RELATIVE_TOL * a.max_abs() {
            return Err(err(
                size_line,
                format!(
                    "general matrix is not symmetric at ({}, {}) by {diff:e}",
                    i + 1,
                    j + 1
                ),
            ));
        }
    }
    Ok(a)
}

/// Lower triangle in `coordinate real symmetric` form with 17 significant digits.
pub fn format_matrix_market(a: &Matrix) -> String {
    let n = a.rows();
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|j| (j..n).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, a[(i, j)]))
        .filter(|&(i, j, v)| v != 0.0 || i == j)
        .collect();
    let _ = writeln!(out, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {v:.16e}", i + 1, j + 1);
    }
    out
}

pub fn write_matrix_market(path: &Path, a: &Matrix) -> Result<()> {
    std::fs::write(path, format_matrix_market(a)).map_err(|e| BenchError::io(path, e))
}
