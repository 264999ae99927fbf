//! Hamiltonian Descent on quadratics via the exact flow.
//!
//! Started from rest at `x`, the flow of `H(x, v) = f(x) + |v|^2 / 2` for
//! `f(x) = x^T A x / 2 - b^T x` is
//!
//! ```text
//! x_eta - x_* = cos(eta sqrt(A)) (x - x_*)
//! v_eta       = -sqrt(A) sin(eta sqrt(A)) (x - x_*)
//! ```
//!
//! Each Hamiltonian Descent iteration runs the flow for `eta_k` and then
//! discards the velocity, so the kinetic energy at restart is exactly the
//! decrease in `f`.

use alloc::vec::Vec;

use crate::chebyshev::TimeSchedule;
use crate::error::{Error, Result};
use crate::linalg::{PhaseState, QuadraticProblem};
use crate::trace::{ConvergenceTrace, Recorder, RunOptions, Status};

/// Energy bookkeeping for one Hamiltonian Descent iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdStepRecord {
    pub k: usize,
    pub eta: f64,
    pub f_before: f64,
    pub f_after: f64,
    /// `|v_{k+1}|^2 / 2` at the end of the flow, before the restart.
    pub kinetic_after: f64,
    pub dist_to_opt: f64,
}

impl HdStepRecord {
    /// `|f_after + kinetic_after - f_before|`.
    pub fn energy_defect(&self) -> f64 {
        (self.f_after + self.kinetic_after - self.f_before).abs()
    }
}

#[derive(Debug, Clone)]
pub struct HdOutcome {
    pub x: Vec<f64>,
    pub steps: Vec<HdStepRecord>,
    pub trace: ConvergenceTrace,
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
        });
    }
    Ok(())
}

/// Runs the flow for duration `eta` from `(x, 0)`.
pub fn hd_flow_step(p: &QuadraticProblem, x: &[f64], eta: f64) -> Result<PhaseState> {
    p.check_dim(x)?;
    check_eta(eta)?;
    let e = p.eigen();
    let offset: Vec<f64> = x.iter().zip(p.x_star()).map(|(a, b)| a - b).collect();
    let c = e.to_eigenbasis(&offset)?;
    let mut cx = Vec::with_capacity(c.len());
    let mut cv = Vec::with_capacity(c.len());
    for (&cj, &lam) in c.iter().zip(&e.eigenvalues) {
        let r = libm::sqrt(lam);
        let (s, co) = (libm::sin(eta * r), libm::cos(eta * r));
        cx.push(co * cj);
        cv.push(-r * s * cj);
    }
    let mut xn = e.from_eigenbasis(&cx)?;
    for (xi, si) in xn.iter_mut().zip(p.x_star()) {
        *xi += si;
    }
    let v = e.from_eigenbasis(&cv)?;
    Ok(PhaseState { x: xn, v })
}

/// Hamiltonian Descent with one scalar integration time per iteration.
pub fn hd_run(p: &QuadraticProblem, x1: &[f64], schedule: &TimeSchedule) -> Result<HdOutcome> {
    hd_run_with(p, x1, schedule, &RunOptions::iterations(schedule.len()))
}

/// As [`hd_run`], with an optional residual stop and clock. `opts.max_iters`
/// caps the number of schedule entries consumed.
pub fn hd_run_with(
    p: &QuadraticProblem,
    x1: &[f64],
    schedule: &TimeSchedule,
    opts: &RunOptions,
) -> Result<HdOutcome> {
    p.check_dim(x1)?;
    if !schedule.is_empty() && schedule.width() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: schedule.width(),
        });
    }
    let mut rec = Recorder::new("hd", p, x1, opts);
    let mut x = x1.to_vec();
    let mut steps = Vec::with_capacity(schedule.len());
    if let Status::Converged = rec.record(0, &x, 0.0)? {
        return Ok(HdOutcome {
            x,
            steps,
            trace: rec.finish(),
        });
    }
    let mut f = p.value(&x)?;
    for (k, &eta) in schedule.etas().iter().enumerate().take(opts.max_iters) {
        let state = hd_flow_step(p, &x, eta)?;
        let kinetic = state.kinetic_energy();
        let f_after = p.value(&state.x)?;
        steps.push(HdStepRecord {
            k: k + 1,
            eta,
            f_before: f,
            f_after,
            kinetic_after: kinetic,
            dist_to_opt: p.dist_to_opt(&state.x)?,
        });
        x = state.x;
        f = f_after;
        match rec.record(k + 1, &x, kinetic)? {
            Status::Continue => {}
            Status::Converged | Status::Diverged => break,
        }
    }
    Ok(HdOutcome {
        x,
        steps,
        trace: rec.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{
        hd_schedule, worst_case_bound, Permutation, ScheduleKind, SpectrumBounds,
    };
    use crate::linalg::{norm2, SpdMatrix};
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

    fn scalar4() -> QuadraticProblem {
        QuadraticProblem::new(SpdMatrix::from_diagonal(&[4.0]).unwrap(), vec![0.0]).unwrap()
    }

    #[test]
    fn zero_duration_is_identity() {
        let a = SpdMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let p = QuadraticProblem::new(a, vec![1.0, 2.0]).unwrap();
        let s = hd_flow_step(&p, &[0.3, -0.4], 0.0).unwrap();
        assert!((s.x[0] - 0.3).abs() < 1e-15 && (s.x[1] + 0.4).abs() < 1e-15);
        assert!(s.v.iter().all(|v| v.abs() < 1e-15));
        assert!(hd_flow_step(&p, &[0.3, -0.4], -1.0).is_err());
        assert!(hd_flow_step(&p, &[0.3], 1.0).is_err());
    }

    #[test]
    fn scalar_flow() {
        let p = scalar4();
        let s = hd_flow_step(&p, &[1.0], FRAC_PI_6).unwrap();
        assert!((s.x[0] - 0.5).abs() < 1e-15);
        assert!((s.v[0] + 1.7320508075688772).abs() < 1e-15);
        let energy = p.value(&s.x).unwrap() + s.kinetic_energy();
        assert!((energy - 2.0).abs() < 1e-14);

        let s = hd_flow_step(&p, &[1.0], FRAC_PI_4).unwrap();
        assert!(s.x[0].abs() < 1e-15);
    }

    #[test]
    fn empty_schedule() {
        let p = scalar4();
        let sched = TimeSchedule::scalar(ScheduleKind::Custom, vec![]).unwrap();
        let out = hd_run(&p, &[1.0], &sched).unwrap();
        assert_eq!(out.x, vec![1.0]);
        assert!(out.steps.is_empty());
        assert_eq!(out.trace.rows.len(), 1);
    }

    #[test]
    fn diagonal_product_form() {
        let a = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let p = QuadraticProblem::new(a, vec![0.0; 2]).unwrap();
        let sched = TimeSchedule::scalar(ScheduleKind::Constant, vec![FRAC_PI_2; 2]).unwrap();
        let out = hd_run(&p, &[1.0, 1.0], &sched).unwrap();
        // (cos(pi/2)^2, cos(pi)^2)
        assert!(out.x[0].abs() < 1e-15);
        assert!((out.x[1] - 1.0).abs() < 1e-14);
        assert_eq!(out.steps.len(), 2);
        assert_eq!(out.trace.rows.len(), 3);
        for s in &out.steps {
            assert!(s.energy_defect() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_schedule_beats_bound() {
        let a = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let p = QuadraticProblem::new(a, vec![0.0; 2]).unwrap();
        let bounds = SpectrumBounds::new(1.0, 4.0).unwrap();
        let sched = hd_schedule(bounds, 2, &Permutation::identity(2)).unwrap();
        let out = hd_run(&p, &[1.0, 1.0], &sched).unwrap();
        let bound = worst_case_bound(4.0, 2).unwrap() * libm::sqrt(2.0);
        assert!(norm2(&out.x) < bound);
    }

    #[test]
    fn rejects_coordinate_rows() {
        let p = QuadraticProblem::new(SpdMatrix::from_diagonal(&[1.0, 2.0]).unwrap(), vec![0.0; 2])
            .unwrap();
        let sched = TimeSchedule::constant_row(ScheduleKind::Custom, vec![1.0, 1.0]).unwrap();
        assert!(hd_run(&p, &[1.0, 1.0], &sched).is_err());
    }
}
