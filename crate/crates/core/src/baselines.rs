//! First-order reference methods: gradient descent, the Chebyshev
//! semi-iterative method and conjugate gradient.

use alloc::vec::Vec;

use crate::chebyshev::SpectrumBounds;
use crate::error::{Error, Result};
use crate::linalg::{dot, QuadraticProblem};
use crate::trace::{Recorder, RunOptions, RunOutcome, Status};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineMethod {
    GradientDescent { step: f64 },
    Chebyshev { bounds: SpectrumBounds },
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    pub max_iters: usize,
    pub stop_tol: Option<f64>,
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        match self.method {
            BaselineMethod::GradientDescent { step } if !(step > 0.0) || !step.is_finite() => {
                Err(Error::InvalidParameter {
                    name: "step",
                    value: step,
                })
            }
            BaselineMethod::Chebyshev { bounds } if bounds.m() >= bounds.l() => {
                Err(Error::InvalidBounds {
                    m: bounds.m(),
                    l: bounds.l(),
                })
            }
            _ => Ok(()),
        }
    }

    pub fn run(
        &self,
        p: &QuadraticProblem,
        x1: &[f64],
        clock: Option<fn() -> u64>,
    ) -> Result<RunOutcome> {
        self.validate()?;
        let opts = RunOptions {
            max_iters: self.max_iters,
            stop_tol: self.stop_tol,
            clock,
        };
        match self.method {
            BaselineMethod::GradientDescent { step } => gd_run(p, x1, step, &opts),
            BaselineMethod::Chebyshev { bounds } => chebyshev_method_run(p, x1, bounds, &opts),
            BaselineMethod::ConjugateGradient => cg_run(p, x1, &opts),
        }
    }
}

fn finish_or_continue(status: Status) -> bool {
    matches!(status, Status::Converged | Status::Diverged)
}

/// `x_{k+1} = x_k - step (A x_k - b)`.
pub fn gd_run(
    p: &QuadraticProblem,
    x1: &[f64],
    step: f64,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    p.check_dim(x1)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
        });
    }
    let mut rec = Recorder::new("gd", p, x1, opts);
    let mut x = x1.to_vec();
    if finish_or_continue(rec.record(0, &x, 0.0)?) {
        return Ok(RunOutcome {
            x,
            trace: rec.finish(),
        });
    }
    for k in 0..opts.max_iters {
        let g = p.residual(&x)?;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * gi;
        }
        if finish_or_continue(rec.record(k + 1, &x, 0.0)?) {
            break;
        }
    }
    Ok(RunOutcome {
        x,
        trace: rec.finish(),
    })
}

/// Chebyshev semi-iterative method on `[m, L]`.
///
/// Uses the three-term recurrence with `theta = (L+m)/2`, `delta = (L-m)/2`,
/// `sigma = theta/delta`:
///
/// ```text
/// d_0 = r_0 / theta,                rho_0 = 1 / sigma
/// rho_k = 1 / (2 sigma - rho_{k-1}),  d_k = rho_k rho_{k-1} d_{k-1} + (2 rho_k / delta) r_k
/// ```
///
/// After `K` steps the error is `Phi_K-bar(A) (x_1 - x_*)`.
pub fn chebyshev_method_run(
    p: &QuadraticProblem,
    x1: &[f64],
    bounds: SpectrumBounds,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    p.check_dim(x1)?;
    if bounds.m() >= bounds.l() {
        return Err(Error::InvalidBounds {
            m: bounds.m(),
            l: bounds.l(),
        });
    }
    let theta = 0.5 * (bounds.l() + bounds.m());
    let delta = 0.5 * (bounds.l() - bounds.m());
    let sigma = theta / delta;

    let mut rec = Recorder::new("chebyshev", p, x1, opts);
    let mut x = x1.to_vec();
    if finish_or_continue(rec.record(0, &x, 0.0)?) {
        return Ok(RunOutcome {
            x,
            trace: rec.finish(),
        });
    }
    let mut rho = 1.0 / sigma;
    let mut d: Vec<f64> = Vec::new();
    for k in 0..opts.max_iters {
        // r = b - A x
        let r: Vec<f64> = p.residual(&x)?.into_iter().map(|v| -v).collect();
        if k == 0 {
            d = r.iter().map(|ri| ri / theta).collect();
        } else {
            let rho_next = 1.0 / (2.0 * sigma - rho);
            for (di, ri) in d.iter_mut().zip(&r) {
                *di = rho_next * rho * *di + 2.0 * rho_next / delta * ri;
            }
            rho = rho_next;
        }
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += di;
        }
        if finish_or_continue(rec.record(k + 1, &x, 0.0)?) {
            break;
        }
    }
    Ok(RunOutcome {
        x,
        trace: rec.finish(),
    })
}

/// Conjugate gradient (Hestenes-Stiefel).
pub fn cg_run(p: &QuadraticProblem, x1: &[f64], opts: &RunOptions) -> Result<RunOutcome> {
    p.check_dim(x1)?;
    let mut rec = Recorder::new("cg", p, x1, opts);
    let mut x = x1.to_vec();
    if finish_or_continue(rec.record(0, &x, 0.0)?) {
        return Ok(RunOutcome {
            x,
            trace: rec.finish(),
        });
    }
    let mut r: Vec<f64> = p.residual(&x)?.into_iter().map(|v| -v).collect();
    let mut dir = r.clone();
    let mut rr = dot(&r, &r);
    for k in 0..opts.max_iters {
        if rr == 0.0 {
            break;
        }
        let ad = p.a().mul_vec(&dir)?;
        let curvature = dot(&dir, &ad);
        if !(curvature > 0.0) {
            return Err(Error::CgBreakdown {
                iteration: k + 1,
                curvature,
            });
        }
        let alpha = rr / curvature;
        for i in 0..x.len() {
            x[i] += alpha * dir[i];
            r[i] -= alpha * ad[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for (di, ri) in dir.iter_mut().zip(&r) {
            *di = ri + beta * *di;
        }
        rr = rr_next;
        if finish_or_continue(rec.record(k + 1, &x, 0.0)?) {
            break;
        }
    }
    Ok(RunOutcome {
        x,
        trace: rec.finish(),
    })
}
