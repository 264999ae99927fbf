//! CSV persistence for convergence traces.
//!
//! ```text
//! # method: hd
//! # problem_sha256: 3f1c...
//! # config: schedule=chebyshev
//! # diverged: false
//! k,f_gap,dist_to_opt,residual_inf,hamiltonian,kinetic,wallclock_ns
//! 0,1.2500000000000000e0,...
//! ```
//!
//! Floats carry 17 significant digits so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use hd_core::{ConvergenceTrace, TraceRow};

use crate::error::{BenchError, Result};

pub const COLUMNS: [&str; 7] = [
    "k",
    "f_gap",
    "dist_to_opt",
    "residual_inf",
    "hamiltonian",
    "kinetic",
    "wallclock_ns",
];

/// Comment block written above the column header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceHeader {
    pub method: String,
    pub problem_hash: String,
    /// `key=value` pairs echoing the run configuration, in order.
    pub config: Vec<(String, String)>,
    pub diverged: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
}

pub(crate) fn fmt_f64(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

pub fn format_trace(header: &TraceHeader, rows: &[TraceRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# method: {}", header.method);
    let _ = writeln!(s, "# problem_sha256: {}", header.problem_hash);
    for (k, v) in &header.config {
        let _ = writeln!(s, "# config: {k}={v}");
    }
    let _ = writeln!(s, "# diverged: {}", header.diverged);
    for n in &header.notes {
        let _ = writeln!(s, "# note: {}", n.replace('\n', " "));
    }
    s.push_str(&COLUMNS.join(","));
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{},", r.k);
        for v in [
            r.f_gap,
            r.dist_to_opt,
            r.residual_inf,
            r.hamiltonian,
            r.kinetic,
        ] {
            fmt_f64(&mut s, v);
            s.push(',');
        }
        let _ = writeln!(s, "{}", r.wallclock_ns);
    }
    s
}

pub fn header_for(
    trace: &ConvergenceTrace,
    problem_hash: &str,
    config: Vec<(String, String)>,
) -> TraceHeader {
    TraceHeader {
        method: trace.method.clone(),
        problem_hash: problem_hash.to_string(),
        config,
        diverged: trace.diverged,
        notes: trace.notes.clone(),
    }
}

pub fn write_trace(path: &Path, header: &TraceHeader, rows: &[TraceRow]) -> Result<()> {
    std::fs::write(path, format_trace(header, rows)).map_err(|e| BenchError::io(path, e))
}

pub fn parse_trace(text: &str, origin: &Path) -> Result<TraceFile> {
    let err = |line: usize, msg: String| BenchError::parse(origin, line, msg);
    let mut header = TraceHeader::default();
    let mut rows = Vec::new();
    let mut seen_columns = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(comment) = raw.strip_prefix("# ") {
            let (key, value) = comment
                .split_once(": ")
                .ok_or_else(|| err(line, format!("malformed header '{raw}'")))?;
            match key {
                "method" => header.method = value.to_string(),
                "problem_sha256" => header.problem_hash = value.to_string(),
                "diverged" => {
                    header.diverged = value
                        .parse()
                        .map_err(|_| err(line, format!("bad diverged flag '{value}'")))?
                }
                "note" => header.notes.push(value.to_string()),
                "config" => {
                    let (k, v) = value
                        .split_once('=')
                        .ok_or_else(|| err(line, format!("config entry without '=': '{value}'")))?;
                    header.config.push((k.to_string(), v.to_string()));
                }
                other => return Err(err(line, format!("unknown header key '{other}'"))),
            }
            continue;
        }
        if !seen_columns {
            if raw != COLUMNS.join(",") {
                return Err(err(
                    line,
                    format!("expected column header '{}'", COLUMNS.join(",")),
                ));
            }
            seen_columns = true;
            continue;
        }
        let f: Vec<&str> = raw.split(',').collect();
        if f.len() != COLUMNS.len() {
            return Err(err(
                line,
                format!("expected {} fields, found {}", COLUMNS.len(), f.len()),
            ));
        }
        let float = |j: usize| -> Result<f64> {
            f[j].parse()
                .map_err(|_| err(line, format!("bad {} value '{}'", COLUMNS[j], f[j])))
        };
        let int = |j: usize| -> Result<u64> {
            f[j].parse()
                .map_err(|_| err(line, format!("bad {} value '{}'", COLUMNS[j], f[j])))
        };
        rows.push(TraceRow {
            k: int(0)? as usize,
            f_gap: float(1)?,
            dist_to_opt: float(2)?,
            residual_inf: float(3)?,
            hamiltonian: float(4)?,
            kinetic: float(5)?,
            wallclock_ns: int(6)?,
        });
    }
    if !seen_columns {
        return Err(err(
            text.lines().count().max(1),
            "missing column header".into(),
        ));
    }
    Ok(TraceFile { header, rows })
}

pub fn read_trace(path: &Path) -> Result<TraceFile> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_trace(&text, path)
}

/// The trace text with the `wallclock_ns` column removed, for byte comparisons.
pub fn strip_wallclock(text: &str) -> String {
    text.lines()
        .map(|l| {
            if l.starts_with('#') {
                l
            } else {
                l.rsplit_once(',').map_or(l, |(head, _)| head)
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}
