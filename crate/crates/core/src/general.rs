//! Hamiltonian flows beyond quadratics: the closed-form flow of the 1-D
//! exponential loss, its gradient-flow comparator, a Störmer-Verlet
//! integrator, and Hamiltonian Descent with `eta = 1 / (2 sqrt(L))` for
//! smooth strongly convex objectives.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::linalg::{dist2, dot, norm2, sym_eigendecompose, Matrix, PhaseState, QuadraticProblem};

/// A differentiable objective with optional curvature constants.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], grad: &mut [f64]);
    /// `m` with `f` m-strongly convex.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }
    /// `L` with `grad f` L-Lipschitz.
    fn smoothness(&self) -> Option<f64> {
        None
    }
}

/// The quadratic `x^T A x / 2 - b^T x` with `m = lambda_min`, `L = lambda_max`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective(pub QuadraticProblem);

impl SmoothObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x).unwrap_or(f64::NAN)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.0.row_dot(i, x) - self.0.b()[i];
        }
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(self.0.a().lambda_min())
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.0.a().lambda_max())
    }
}

/// `f(x) = exp(-x)` on the real line. Convex but neither strongly convex
/// nor globally smooth, and without a minimizer.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpLoss;

impl SmoothObjective for ExpLoss {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        libm::exp(-x[0])
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad[0] = -libm::exp(-x[0]);
    }
}

/// `f(x) = log sum_i exp(z_i^T x) + (mu / 2) |x|^2` for feature rows `z_i`.
///
/// The log-sum-exp Hessian is a covariance of a distribution on the
/// coordinate vectors, bounded by `1/2 Z^T Z`, so `m = mu` and
/// `L = mu + lambda_max(Z^T Z) / 2`.
#[derive(Debug, Clone)]
pub struct RegularizedLogSumExp {
    features: Matrix,
    mu: f64,
    smoothness: f64,
}

impl RegularizedLogSumExp {
    pub fn new(features: Matrix, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
            });
        }
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        let gram = features.transpose().matmul(&features)?;
        let top = sym_eigendecompose(&gram)?.max_eigenvalue().max(0.0);
        Ok(Self {
            features,
            mu,
            smoothness: mu + 0.5 * top,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        (0..self.features.rows())
            .map(|i| dot(self.features.row(i), x))
            .collect()
    }
}

impl SmoothObjective for RegularizedLogSumExp {
    fn dim(&self) -> usize {
        self.features.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.logits(x);
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = z.iter().map(|zi| libm::exp(zi - top)).sum();
        top + libm::log(s) + 0.5 * self.mu * dot(x, x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let z = self.logits(x);
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = z.iter().map(|zi| libm::exp(zi - top)).collect();
        let s: f64 = w.iter().sum();
        for (g, xi) in grad.iter_mut().zip(x) {
            *g = self.mu * xi;
        }
        for (i, wi) in w.iter().enumerate() {
            let pi = wi / s;
            for (g, zij) in grad.iter_mut().zip(self.features.row(i)) {
                *g += pi * zij;
            }
        }
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(self.mu)
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }
}

/// Closed-form Hamiltonian flow of `f(x) = exp(-x)` from `(x0, 0)`:
///
/// ```text
/// s   = sqrt(2 theta) t,  theta = exp(-x0)
/// x_t = x0 - log 4 + s + 2 log(1 + exp(-s))
/// v_t = sqrt(2 theta) (1 - exp(-s)) / (1 + exp(-s))
/// ```
///
/// `log1p`/`expm1` keep both terms accurate for small and large `s`.
pub fn exp_flow(x0: f64, t: f64) -> (f64, f64) {
    let speed = libm::sqrt(2.0 * libm::exp(-x0));
    let s = speed * t;
    let e = libm::exp(-s);
    let x = x0 - 2.0 * LN_2 + s + 2.0 * libm::log1p(e);
    let v = speed * (-libm::expm1(-s)) / (1.0 + e);
    (x, v)
}

/// Gradient flow of `exp(-x)`: `x_t = log(exp(x0) + t)`.
pub fn exp_gradient_flow(x0: f64, t: f64) -> f64 {
    x0 + libm::log1p(t * libm::exp(-x0))
}

/// `n` kick-drift-kick Störmer-Verlet steps of size `h` for
/// `dx/dt = v`, `dv/dt = -grad f(x)`.
pub fn leapfrog<O: SmoothObjective + ?Sized>(
    obj: &O,
    state: &PhaseState,
    h: f64,
    n: usize,
) -> Result<PhaseState> {
    if state.x.len() != obj.dim() || state.v.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: state.x.len(),
        });
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
        });
    }
    let mut x = state.x.clone();
    let mut v = state.v.clone();
    let mut g = vec![0.0; x.len()];
    if n == 0 {
        return Ok(PhaseState { x, v });
    }
    obj.gradient(&x, &mut g);
    for step in 0..n {
        for (vi, gi) in v.iter_mut().zip(&g) {
            *vi -= 0.5 * h * gi;
        }
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi += h * vi;
        }
        obj.gradient(&x, &mut g);
        for (vi, gi) in v.iter_mut().zip(&g) {
            *vi -= 0.5 * h * gi;
        }
        if x.iter().chain(&v).any(|z| !z.is_finite()) {
            return Err(Error::IntegratorNonFinite { step });
        }
    }
    Ok(PhaseState { x, v })
}

/// Trajectory of [`hd_general_run`].
#[derive(Debug, Clone)]
pub struct GeneralRun {
    pub x: Vec<f64>,
    /// `f(x_k)` for `k = 1..=K+1`.
    pub values: Vec<f64>,
    /// `|x_k - x_*|^2` for `k = 1..=K+1`, when `x_*` was supplied.
    pub dist_sq: Vec<f64>,
    /// `|v|^2 / 2` at the end of each flow, before the restart.
    pub kinetic: Vec<f64>,
    pub eta: f64,
}

impl GeneralRun {
    /// `|x_{k+1} - x_*|^2 / |x_k - x_*|^2` per iteration.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.dist_sq.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Hamiltonian Descent with `eta = 1 / (2 sqrt(L))`: each iteration restarts
/// from rest and integrates with `steps_per_flow` leapfrog substeps.
pub fn hd_general_run<O: SmoothObjective + ?Sized>(
    obj: &O,
    x1: &[f64],
    k: usize,
    steps_per_flow: usize,
    x_star: Option<&[f64]>,
) -> Result<GeneralRun> {
    let l = obj.smoothness().ok_or(Error::MissingSmoothness)?;
    if x1.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: x1.len(),
        });
    }
    if steps_per_flow == 0 {
        return Err(Error::InvalidParameter {
            name: "steps_per_flow",
            value: 0.0,
        });
    }
    let eta = 1.0 / (2.0 * libm::sqrt(l));
    let h = eta / steps_per_flow as f64;
    let mut x = x1.to_vec();
    let mut values = vec![obj.value(&x)];
    let mut dist_sq = Vec::new();
    let mut kinetic = Vec::with_capacity(k);
    if let Some(xs) = x_star {
        let d = dist2(&x, xs);
        dist_sq.push(d * d);
    }
    for _ in 0..k {
        let state = leapfrog(obj, &PhaseState::at_rest(x), h, steps_per_flow)?;
        kinetic.push(state.kinetic_energy());
        x = state.x;
        values.push(obj.value(&x));
        if let Some(xs) = x_star {
            let d = dist2(&x, xs);
            dist_sq.push(d * d);
        }
    }
    Ok(GeneralRun {
        x,
        values,
        dist_sq,
        kinetic,
        eta,
    })
}

/// Minimizer of a smooth strongly convex objective by gradient descent with
/// step `1/L`, run until `|grad f| <= tol`.
pub fn minimize_reference<O: SmoothObjective + ?Sized>(
    obj: &O,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    let l = obj.smoothness().ok_or(Error::MissingSmoothness)?;
    let mut x = x0.to_vec();
    let mut g = vec![0.0; x.len()];
    for _ in 0..max_iters {
        obj.gradient(&x, &mut g);
        if norm2(&g) <= tol {
            return Ok(x);
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= gi / l;
        }
    }
    obj.gradient(&x, &mut g);
    Err(Error::InvalidParameter {
        name: "reference minimizer gradient norm",
        value: norm2(&g),
    })
}
