//! Run configuration: method tags, schedule and permutation specs, and the
//! per-method validation performed before dispatch.

use std::fmt;
use std::str::FromStr;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hd,
    Chd,
    Gs,
    Sor,
    Jacobi,
    Wjacobi,
    Pchd,
    Rchd,
    Chebyshev,
    Cg,
    Gd,
    HdGeneral,
}

impl Method {
    pub const ALL: [Method; 12] = [
        Method::Hd,
        Method::Chd,
        Method::Gs,
        Method::Sor,
        Method::Jacobi,
        Method::Wjacobi,
        Method::Pchd,
        Method::Rchd,
        Method::Chebyshev,
        Method::Cg,
        Method::Gd,
        Method::HdGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hd => "hd",
            Method::Chd => "chd",
            Method::Gs => "gs",
            Method::Sor => "sor",
            Method::Jacobi => "jacobi",
            Method::Wjacobi => "wjacobi",
            Method::Pchd => "pchd",
            Method::Rchd => "rchd",
            Method::Chebyshev => "chebyshev",
            Method::Cg => "cg",
            Method::Gd => "gd",
            Method::HdGeneral => "hd-general",
        }
    }

    /// Methods that take a per-coordinate time row.
    pub fn is_coordinate(self) -> bool {
        matches!(
            self,
            Method::Chd
                | Method::Gs
                | Method::Sor
                | Method::Jacobi
                | Method::Wjacobi
                | Method::Pchd
                | Method::Rchd
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                BenchError::config(format!(
                    "unknown method '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// `--schedule` value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleSpec {
    Chebyshev,
    Constant(f64),
    Sor(f64),
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleSpec::Chebyshev => f.write_str("chebyshev"),
            ScheduleSpec::Constant(v) => write!(f, "constant:{v}"),
            ScheduleSpec::Sor(c) => write!(f, "sor:{c}"),
        }
    }
}

fn parse_param(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| BenchError::config(format!("bad {what} '{s}'")))
}

impl FromStr for ScheduleSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "chebyshev" => Ok(ScheduleSpec::Chebyshev),
            Some(("constant", v)) => Ok(ScheduleSpec::Constant(parse_param(v, "constant time")?)),
            Some(("sor", c)) => Ok(ScheduleSpec::Sor(parse_param(c, "relaxation")?)),
            _ => Err(BenchError::config(format!(
                "bad schedule '{s}' (expected chebyshev, constant:<eta> or sor:<c>)"
            ))),
        }
    }
}

/// `--perm` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermSpec {
    #[default]
    Identity,
    Reversed,
    Random(u64),
}

impl fmt::Display for PermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermSpec::Identity => f.write_str("identity"),
            PermSpec::Reversed => f.write_str("reversed"),
            PermSpec::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl FromStr for PermSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "identity" => Ok(PermSpec::Identity),
            None if s == "reversed" => Ok(PermSpec::Reversed),
            Some(("random", seed)) => seed
                .parse()
                .map(PermSpec::Random)
                .map_err(|_| BenchError::config(format!("bad permutation seed '{seed}'"))),
            _ => Err(BenchError::config(format!(
                "bad permutation '{s}' (expected identity, reversed or random:<seed>)"
            ))),
        }
    }
}

/// Built-in objectives for `hd-general`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectiveName {
    #[default]
    Quadratic,
    ExpLoss,
    RegularizedLogSumExp,
}

impl ObjectiveName {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveName::Quadratic => "quadratic",
            ObjectiveName::ExpLoss => "exp-loss",
            ObjectiveName::RegularizedLogSumExp => "regularized-log-sum-exp",
        }
    }
}

impl fmt::Display for ObjectiveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(ObjectiveName::Quadratic),
            "exp-loss" => Ok(ObjectiveName::ExpLoss),
            "regularized-log-sum-exp" => Ok(ObjectiveName::RegularizedLogSumExp),
            _ => Err(BenchError::config(format!(
                "unknown objective '{s}' (expected quadratic, exp-loss or regularized-log-sum-exp)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    /// Iteration budget `K` (sweeps for coordinate methods, single-coordinate
    /// steps for `rchd`, flows for `hd` and `hd-general`).
    pub iterations: usize,
    pub tol: Option<f64>,
    pub c: Option<f64>,
    pub eta: Option<f64>,
    /// Gradient descent step; defaults to `1 / lambda_max`.
    pub step: Option<f64>,
    pub schedule: Option<ScheduleSpec>,
    pub perm: PermSpec,
    pub seed: u64,
    /// Spectrum bounds for the Chebyshev schedule and method; default to the
    /// exact extreme eigenvalues.
    pub m: Option<f64>,
    pub l: Option<f64>,
    pub steps_per_flow: usize,
    pub objective: ObjectiveName,
    pub mu: f64,
    /// Parallel CHD workers. Not echoed: results do not depend on it.
    pub workers: usize,
}

impl RunConfig {
    pub fn new(method: Method, iterations: usize) -> Self {
        Self {
            method,
            iterations,
            tol: None,
            c: None,
            eta: None,
            step: None,
            schedule: None,
            perm: PermSpec::Identity,
            seed: 0,
            m: None,
            l: None,
            steps_per_flow: 64,
            objective: ObjectiveName::Quadratic,
            mu: 0.1,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::config(msg));
        let method = self.method;
        if let Some(t) = self.tol {
            if !(t > 0.0) || !t.is_finite() {
                return bad(format!("--tol must be positive, got {t}"));
            }
        }
        if let Some(e) = self.eta {
            if !(e > 0.0) || !e.is_finite() {
                return bad(format!("--eta must be positive, got {e}"));
            }
        }
        if let Some(ScheduleSpec::Constant(v)) = self.schedule {
            if !(v > 0.0) {
                return bad(format!("constant schedule time must be positive, got {v}"));
            }
        }
        if let Some(c) = self.relaxation() {
            if !(c > 0.0 && c < 2.0) {
                return bad(format!("relaxation c must lie in (0, 2), got {c}"));
            }
        }
        if self.eta.is_some() && self.schedule.is_some() {
            return bad("--eta and --schedule are mutually exclusive".into());
        }
        if let (Some(c), Some(ScheduleSpec::Sor(s))) = (self.c, self.schedule) {
            if c != s {
                return bad(format!("--c {c} disagrees with --schedule sor:{s}"));
            }
        }
        match (self.m, self.l) {
            (Some(m), Some(l)) if !(m > 0.0 && m <= l && l.is_finite()) => {
                return bad(format!("bounds need 0 < m <= L, got m={m}, L={l}"))
            }
            (Some(_), None) | (None, Some(_)) => {
                return bad("--m and --L must be given together".into())
            }
            _ => {}
        }
        if self.workers == 0 {
            return bad("--workers must be positive".into());
        }

        let uses_schedule = self.schedule.is_some() || self.eta.is_some();
        match method {
            Method::Hd => {
                if self.c.is_some() || matches!(self.schedule, Some(ScheduleSpec::Sor(_))) {
                    return bad("hd takes a chebyshev or constant schedule".into());
                }
            }
            Method::Chd | Method::Pchd | Method::Rchd => {
                if self.schedule == Some(ScheduleSpec::Chebyshev) {
                    return bad(format!(
                        "{method} takes a constant:<eta> or sor:<c> schedule"
                    ));
                }
                if self.c.is_some() && self.eta.is_some() {
                    return bad("--c and --eta are mutually exclusive".into());
                }
            }
            Method::Gs | Method::Jacobi => {
                if uses_schedule || self.c.is_some() {
                    return bad(format!(
                        "{method} fixes its own times; drop --c/--eta/--schedule"
                    ));
                }
            }
            Method::Sor | Method::Wjacobi => {
                if self.relaxation().is_none() {
                    return bad(format!("{method} needs --c or --schedule sor:<c>"));
                }
                if self.eta.is_some()
                    || matches!(
                        self.schedule,
                        Some(ScheduleSpec::Constant(_) | ScheduleSpec::Chebyshev)
                    )
                {
                    return bad(format!("{method} takes only a relaxation parameter"));
                }
            }
            Method::Chebyshev | Method::Cg | Method::Gd => {
                if uses_schedule || self.c.is_some() {
                    return bad(format!("{method} takes no integration times"));
                }
            }
            Method::HdGeneral => {
                if uses_schedule || self.c.is_some() {
                    return bad(
                        "hd-general uses eta = 1/(2 sqrt(L)); drop --c/--eta/--schedule".into(),
                    );
                }
                if self.steps_per_flow == 0 {
                    return bad("--steps-per-flow must be positive".into());
                }
                if !(self.mu > 0.0) || !self.mu.is_finite() {
                    return bad(format!("--mu must be positive, got {}", self.mu));
                }
            }
        }
        if let Some(s) = self.step {
            if method != Method::Gd {
                return bad("--step applies to gd only".into());
            }
            if !(s > 0.0) || !s.is_finite() {
                return bad(format!("--step must be positive, got {s}"));
            }
        }
        Ok(())
    }

    /// Relaxation parameter from `--c` or `--schedule sor:<c>`.
    pub fn relaxation(&self) -> Option<f64> {
        match self.schedule {
            Some(ScheduleSpec::Sor(c)) => Some(c),
            _ => self.c,
        }
    }

    /// `key=value` pairs that determine the run's output.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("method".to_string(), self.method.to_string()),
            ("K".to_string(), self.iterations.to_string()),
        ];
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        if let Some(t) = self.tol {
            push("tol", format!("{t:e}"));
        }
        if let Some(c) = self.c {
            push("c", c.to_string());
        }
        if let Some(e) = self.eta {
            push("eta", e.to_string());
        }
        if let Some(s) = self.step {
            push("step", s.to_string());
        }
        if let Some(s) = self.schedule {
            push("schedule", s.to_string());
        }
        if self.method == Method::Hd {
            push("perm", self.perm.to_string());
        }
        if let (Some(m), Some(l)) = (self.m, self.l) {
            push("m", m.to_string());
            push("L", l.to_string());
        }
        if matches!(self.method, Method::Rchd)
            || self.objective == ObjectiveName::RegularizedLogSumExp
        {
            push("seed", self.seed.to_string());
        }
        if self.method == Method::HdGeneral {
            push("objective", self.objective.to_string());
            push("steps_per_flow", self.steps_per_flow.to_string());
            if self.objective == ObjectiveName::RegularizedLogSumExp {
                push("mu", self.mu.to_string());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!(
            "chebyshev".parse::<ScheduleSpec>().unwrap(),
            ScheduleSpec::Chebyshev
        );
        assert_eq!(
            "constant:0.5".parse::<ScheduleSpec>().unwrap(),
            ScheduleSpec::Constant(0.5)
        );
        assert_eq!(
            "sor:1.5".parse::<ScheduleSpec>().unwrap(),
            ScheduleSpec::Sor(1.5)
        );
        assert!("sor:x".parse::<ScheduleSpec>().is_err());
        assert!("linear".parse::<ScheduleSpec>().is_err());
        assert_eq!("random:7".parse::<PermSpec>().unwrap(), PermSpec::Random(7));
        assert_eq!("reversed".parse::<PermSpec>().unwrap(), PermSpec::Reversed);
        assert!("random:-1".parse::<PermSpec>().is_err());
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("newton".parse::<Method>().is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::new(Method::Sor, 10);
        assert!(cfg.validate().is_err());
        cfg.c = Some(1.5);
        cfg.validate().unwrap();
        cfg.c = Some(2.0);
        assert!(cfg.validate().is_err());

        let mut hd = RunConfig::new(Method::Hd, 5);
        hd.schedule = Some(ScheduleSpec::Sor(1.0));
        assert!(hd.validate().is_err());
        hd.schedule = Some(ScheduleSpec::Chebyshev);
        hd.validate().unwrap();

        let mut chd = RunConfig::new(Method::Chd, 5);
        chd.schedule = Some(ScheduleSpec::Chebyshev);
        assert!(chd.validate().is_err());

        let mut gs = RunConfig::new(Method::Gs, 5);
        gs.eta = Some(0.3);
        assert!(gs.validate().is_err());

        let mut gd = RunConfig::new(Method::Gd, 5);
        gd.step = Some(-1.0);
        assert!(gd.validate().is_err());

        let mut bounds = RunConfig::new(Method::Chebyshev, 5);
        bounds.m = Some(1.0);
        assert!(bounds.validate().is_err());
    }

    #[test]
    fn echo_skips_workers() {
        let mut a = RunConfig::new(Method::Pchd, 5);
        let mut b = a.clone();
        a.workers = 1;
        b.workers = 8;
        assert_eq!(a.echo(), b.echo());
    }
}
