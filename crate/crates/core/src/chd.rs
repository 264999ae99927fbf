//! Coordinate Hamiltonian Descent.
//!
//! Masking the gradient to coordinate `i` leaves a one-dimensional harmonic
//! oscillator around the coordinate minimizer
//! `phi = (b_i - sum_{j != i} A_ij x_j) / A_ii`, so a flow of duration `eta`
//! from rest is
//!
//! ```text
//! x_i' = phi + cos(eta sqrt(A_ii)) (x_i - phi)
//! v_i' = -sqrt(A_ii) sin(eta sqrt(A_ii)) (x_i - phi)
//! ```
//!
//! With `cos(eta sqrt(A_ii)) = 1 - c` a sweep is exactly SOR with relaxation
//! `c`; `c = 1` is Gauss-Seidel.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chebyshev::TimeSchedule;
use crate::error::{Error, Result};
use crate::linalg::{dot, QuadraticProblem};
use crate::trace::{Recorder, RunOptions, RunOutcome, Status};

/// Distance from a zero of `sin(eta sqrt(A_ii))` below which a time is rejected.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateStepResult {
    pub i: usize,
    pub x_new_i: f64,
    pub v_new_i: f64,
    pub phi: f64,
}

/// Minimizer of `f` along coordinate `i` with the other coordinates of `x` fixed.
#[inline]
pub fn coordinate_target(p: &QuadraticProblem, x: &[f64], i: usize) -> f64 {
    let row = p.a().row(i);
    let off: f64 = dot(row, x) - row[i] * x[i];
    (p.b()[i] - off) / row[i]
}

fn check_index(p: &QuadraticProblem, i: usize) -> Result<()> {
    if i >= p.dim() {
        return Err(Error::IndexOutOfRange {
            index: i,
            dim: p.dim(),
        });
    }
    Ok(())
}

fn check_positive_time(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
        });
    }
    Ok(())
}

/// Rejects times where `sin(eta sqrt(a_ii))` vanishes (including `eta <= 0`).
pub fn check_admissible(i: usize, a_ii: f64, eta: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InadmissibleTime { coordinate: i, eta });
    }
    let half_period = PI / libm::sqrt(a_ii);
    let n = libm::round(eta / half_period);
    if (eta - n * half_period).abs() <= ADMISSIBILITY_TOL {
        return Err(Error::InadmissibleTime { coordinate: i, eta });
    }
    Ok(())
}

pub(crate) fn check_admissible_row(p: &QuadraticProblem, row: &[f64]) -> Result<()> {
    p.check_dim(row)?;
    for (i, &eta) in row.iter().enumerate() {
        check_admissible(i, p.a().get(i, i), eta)?;
    }
    Ok(())
}

/// Per-coordinate `cos(eta_i sqrt(A_ii))` and `sqrt(A_ii) sin(eta_i sqrt(A_ii))`.
pub(crate) fn flow_coefficients(p: &QuadraticProblem, row: &[f64]) -> (Vec<f64>, Vec<f64>) {
    row.iter()
        .enumerate()
        .map(|(i, &eta)| {
            let r = libm::sqrt(p.a().get(i, i));
            (libm::cos(eta * r), r * libm::sin(eta * r))
        })
        .unzip()
}

/// Exact coordinate flow on coordinate `i` for duration `eta`, from rest.
/// `x` is not modified.
pub fn chd_coordinate_step(
    p: &QuadraticProblem,
    x: &[f64],
    i: usize,
    eta: f64,
) -> Result<CoordinateStepResult> {
    p.check_dim(x)?;
    check_index(p, i)?;
    check_positive_time(eta)?;
    let r = libm::sqrt(p.a().get(i, i));
    let phi = coordinate_target(p, x, i);
    let dev = x[i] - phi;
    Ok(CoordinateStepResult {
        i,
        x_new_i: phi + libm::cos(eta * r) * dev,
        v_new_i: -r * libm::sin(eta * r) * dev,
        phi,
    })
}

/// In-place sweep `i = 0..d` with precomputed coefficients; returns the
/// kinetic energy drained, `sum_i v_i^2 / 2`.
pub(crate) fn sweep_in_place(
    p: &QuadraticProblem,
    x: &mut [f64],
    cos: &[f64],
    rsin: &[f64],
) -> f64 {
    let mut kinetic = 0.0;
    for i in 0..x.len() {
        let phi = coordinate_target(p, x, i);
        let dev = x[i] - phi;
        x[i] = phi + cos[i] * dev;
        let v = rsin[i] * dev;
        kinetic += 0.5 * v * v;
    }
    kinetic
}

/// One sequential sweep over all coordinates, each flow seeing the
/// coordinates already updated in this sweep.
pub fn chd_sweep(p: &QuadraticProblem, x_k: &[f64], etas_row: &[f64]) -> Result<(Vec<f64>, f64)> {
    p.check_dim(x_k)?;
    p.check_dim(etas_row)?;
    for &eta in etas_row {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
            });
        }
    }
    let (cos, rsin) = flow_coefficients(p, etas_row);
    let mut x = x_k.to_vec();
    let kinetic = sweep_in_place(p, &mut x, &cos, &rsin);
    Ok((x, kinetic))
}

/// Integration time that turns a coordinate flow into an SOR update with
/// relaxation `c`: `eta = arccos(1 - c) / sqrt(a_ii)`.
pub fn sor_time(c: f64, a_ii: f64) -> Result<f64> {
    if !(c > 0.0 && c < 2.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
        });
    }
    if !(a_ii > 0.0) || !a_ii.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a_ii",
            value: a_ii,
        });
    }
    Ok(libm::acos(1.0 - c) / libm::sqrt(a_ii))
}

/// `eta_i = (pi / 2) / sqrt(A_ii)` for every coordinate.
pub fn gauss_seidel_times(p: &QuadraticProblem) -> Vec<f64> {
    (0..p.dim())
        .map(|i| core::f64::consts::FRAC_PI_2 / libm::sqrt(p.a().get(i, i)))
        .collect()
}

/// [`sor_time`] for every coordinate.
pub fn sor_times(p: &QuadraticProblem, c: f64) -> Result<Vec<f64>> {
    (0..p.dim()).map(|i| sor_time(c, p.a().get(i, i))).collect()
}

/// Coordinate Hamiltonian Descent: `opts.max_iters` sweeps cycling through
/// the schedule rows, stopping early once the residual reaches `opts.stop_tol`.
///
/// Every time in the schedule is checked for admissibility before the first
/// sweep.
pub fn chd_run(
    p: &QuadraticProblem,
    x1: &[f64],
    schedule: &TimeSchedule,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    p.check_dim(x1)?;
    if schedule.is_empty() {
        return Err(Error::InvalidParameter {
            name: "schedule length",
            value: 0.0,
        });
    }
    p.check_dim(schedule.row(0))?;
    let coeffs: Vec<(Vec<f64>, Vec<f64>)> = (0..schedule.len())
        .map(|k| {
            let row = schedule.row(k);
            check_admissible_row(p, row).map(|_| flow_coefficients(p, row))
        })
        .collect::<Result<_>>()?;

    let mut rec = Recorder::new("chd", p, x1, opts);
    let mut x = x1.to_vec();
    if let Status::Converged = rec.record(0, &x, 0.0)? {
        return Ok(RunOutcome {
            x,
            trace: rec.finish(),
        });
    }
    for k in 0..opts.max_iters {
        let (cos, rsin) = &coeffs[k % coeffs.len()];
        let kinetic = sweep_in_place(p, &mut x, cos, rsin);
        match rec.record(k + 1, &x, kinetic)? {
            Status::Continue => {}
            Status::Converged | Status::Diverged => break,
        }
    }
    Ok(RunOutcome {
        x,
        trace: rec.finish(),
    })
}

/// `G = sum_j A_jj / sin^2(eta_j sqrt(A_jj))`.
pub fn rchd_normalizer(p: &QuadraticProblem, etas: &[f64]) -> Result<f64> {
    Ok(rchd_weights(p, etas)?.iter().sum())
}

fn rchd_weights(p: &QuadraticProblem, etas: &[f64]) -> Result<Vec<f64>> {
    check_admissible_row(p, etas)?;
    Ok(etas
        .iter()
        .enumerate()
        .map(|(i, &eta)| {
            let a = p.a().get(i, i);
            let s = libm::sin(eta * libm::sqrt(a));
            a / (s * s)
        })
        .collect())
}

/// Sampling probabilities `p_i = (A_ii / sin^2(eta_i sqrt(A_ii))) / G`.
pub fn rchd_probabilities(p: &QuadraticProblem, etas: &[f64]) -> Result<Vec<f64>> {
    let w = rchd_weights(p, etas)?;
    let g: f64 = w.iter().sum();
    Ok(w.into_iter().map(|wi| wi / g).collect())
}

/// Expected one-step decrease of `f` for randomized CHD from `x`:
/// `sum_i p_i sin^2(eta_i sqrt(A_ii)) ((A x)_i - b_i)^2 / (2 A_ii)`.
pub fn rchd_expected_decrease(
    p: &QuadraticProblem,
    x: &[f64],
    probabilities: &[f64],
    etas: &[f64],
) -> Result<f64> {
    p.check_dim(probabilities)?;
    p.check_dim(etas)?;
    let r = p.residual(x)?;
    Ok((0..p.dim())
        .map(|i| {
            let a = p.a().get(i, i);
            let s = libm::sin(etas[i] * libm::sqrt(a));
            0.5 * probabilities[i] * s * s * r[i] * r[i] / a
        })
        .sum())
}

/// Bound `(1 - lambda_min / G)^K` on `E[f(x_{K+1}) - f_*] / (f(x_1) - f_*)`.
pub fn rchd_rate_bound(p: &QuadraticProblem, etas: &[f64], k: usize) -> Result<f64> {
    let g = rchd_normalizer(p, etas)?;
    Ok(libm::pow(1.0 - p.a().lambda_min() / g, k as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RchdConfig {
    pub probabilities: Vec<f64>,
    pub seed: u64,
    pub iterations: usize,
    pub etas: Vec<f64>,
}

impl RchdConfig {
    /// Uses the rate-optimal probabilities from [`rchd_probabilities`].
    pub fn new(p: &QuadraticProblem, etas: Vec<f64>, seed: u64, iterations: usize) -> Result<Self> {
        let probabilities = rchd_probabilities(p, &etas)?;
        Ok(Self {
            probabilities,
            seed,
            iterations,
            etas,
        })
    }

    pub fn validate(&self, p: &QuadraticProblem) -> Result<()> {
        p.check_dim(&self.probabilities)?;
        check_admissible_row(p, &self.etas)?;
        let sum: f64 = self.probabilities.iter().sum();
        if self
            .probabilities
            .iter()
            .any(|&q| !(q > 0.0) || !q.is_finite())
            || (sum - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidProbabilities);
        }
        Ok(())
    }
}

/// Inverse-CDF draw from a discrete distribution.
fn sample_index(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

/// Randomized Coordinate Hamiltonian Descent: each iteration flows one
/// coordinate drawn from `config.probabilities` with a seeded ChaCha stream.
pub fn rchd_run(
    p: &QuadraticProblem,
    x1: &[f64],
    config: &RchdConfig,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    p.check_dim(x1)?;
    config.validate(p)?;
    let (cos, rsin) = flow_coefficients(p, &config.etas);
    let cumulative: Vec<f64> = config
        .probabilities
        .iter()
        .scan(0.0, |acc, &q| {
            *acc += q;
            Some(*acc)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut rec = Recorder::new("rchd", p, x1, opts);
    let mut x = x1.to_vec();
    if let Status::Converged = rec.record(0, &x, 0.0)? {
        return Ok(RunOutcome {
            x,
            trace: rec.finish(),
        });
    }
    let iters = config.iterations.min(opts.max_iters);
    for k in 0..iters {
        let i = sample_index(&cumulative, rng.random::<f64>());
        let phi = coordinate_target(p, &x, i);
        let dev = x[i] - phi;
        x[i] = phi + cos[i] * dev;
        let v = rsin[i] * dev;
        match rec.record(k + 1, &x, 0.5 * v * v)? {
            Status::Continue => {}
            Status::Converged | Status::Diverged => break,
        }
    }
    Ok(RunOutcome {
        x,
        trace: rec.finish(),
    })
}
