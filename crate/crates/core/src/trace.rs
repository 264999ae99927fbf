//! Per-iteration convergence records shared by every solver.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::{norm_inf, QuadraticProblem};

/// Iterates whose infinity norm exceeds this multiple of `1 + ||x_1||_inf`
/// count as diverged.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

/// One row of a [`ConvergenceTrace`], describing the iterate after `k`
/// iterations (`k = 0` is the starting point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub f_gap: f64,
    pub dist_to_opt: f64,
    pub residual_inf: f64,
    /// `f(x_k) + kinetic`; for the Hamiltonian methods this equals `f(x_{k-1})`.
    pub hamiltonian: f64,
    /// Kinetic energy drained during iteration `k`.
    pub kinetic: f64,
    pub wallclock_ns: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTrace {
    pub method: String,
    pub rows: Vec<TraceRow>,
    pub diverged: bool,
    pub notes: Vec<String>,
}

impl ConvergenceTrace {
    pub fn new(method: &str) -> Self {
        Self {
            method: method.into(),
            ..Self::default()
        }
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Number of completed iterations.
    pub fn iterations(&self) -> usize {
        self.rows.last().map_or(0, |r| r.k)
    }
}

/// Termination and timing controls common to the iterative solvers.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub max_iters: usize,
    /// Stop once `||A x - b||_inf <= stop_tol`.
    pub stop_tol: Option<f64>,
    /// Monotone nanosecond clock; `None` records zeros.
    pub clock: Option<fn() -> u64>,
}

impl RunOptions {
    pub fn iterations(max_iters: usize) -> Self {
        Self {
            max_iters,
            stop_tol: None,
            clock: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.stop_tol = Some(tol);
        self
    }

    pub fn with_clock(mut self, clock: fn() -> u64) -> Self {
        self.clock = Some(clock);
        self
    }
}

/// Final iterate plus its trace.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub x: Vec<f64>,
    pub trace: ConvergenceTrace,
}

impl RunOutcome {
    pub fn diverged(&self) -> bool {
        self.trace.diverged
    }
}

pub(crate) struct Recorder<'a> {
    problem: &'a QuadraticProblem,
    clock: Option<fn() -> u64>,
    start: u64,
    blowup: f64,
    stop_tol: Option<f64>,
    pub trace: ConvergenceTrace,
}

pub(crate) enum Status {
    Continue,
    Converged,
    Diverged,
}

impl<'a> Recorder<'a> {
    pub fn new(method: &str, problem: &'a QuadraticProblem, x1: &[f64], opts: &RunOptions) -> Self {
        let start = opts.clock.map_or(0, |c| c());
        Self {
            problem,
            clock: opts.clock,
            start,
            blowup: DIVERGENCE_FACTOR * (1.0 + norm_inf(x1)),
            stop_tol: opts.stop_tol,
            trace: ConvergenceTrace::new(method),
        }
    }

    /// Records the iterate after iteration `k` and reports whether to stop.
    pub fn record(&mut self, k: usize, x: &[f64], kinetic: f64) -> Result<Status> {
        let wallclock_ns = self.clock.map_or(0, |c| c().saturating_sub(self.start));
        if x.iter().any(|v| !v.is_finite()) || norm_inf(x) > self.blowup {
            self.trace.diverged = true;
            return Ok(Status::Diverged);
        }
        let p = self.problem;
        let residual_inf = norm_inf(&p.residual(x)?);
        let f_gap = p.f_gap(x)?;
        self.trace.rows.push(TraceRow {
            k,
            f_gap,
            dist_to_opt: p.dist_to_opt(x)?,
            residual_inf,
            hamiltonian: p.f_star() + f_gap + kinetic,
            kinetic,
            wallclock_ns,
        });
        match self.stop_tol {
            Some(tol) if residual_inf <= tol => Ok(Status::Converged),
            _ => Ok(Status::Continue),
        }
    }

    pub fn note(&mut self, note: String) {
        self.trace.notes.push(note);
    }

    pub fn finish(self) -> ConvergenceTrace {
        self.trace
    }
}
