//! Parallel Coordinate Hamiltonian Descent.
//!
//! Every coordinate flows from the same snapshot `x_k`:
//! `x_{k+1}[i] = q_i + cos(eta_i sqrt(A_ii)) (x_k[i] - q_i)` with
//! `q_i = (b_i - sum_{j != i} A_ij x_k[j]) / A_ii`. Cosine zero is Jacobi,
//! cosine `1 - c` is weighted Jacobi. The error evolves by the affine map
//! `T = I - (I - M) D^-1 A`, `M = diag(cos(eta_i sqrt(A_ii)))`.

use alloc::format;
use alloc::vec::Vec;

use crate::chd::{check_admissible_row, coordinate_target, flow_coefficients};
use crate::chebyshev::TimeSchedule;
use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, sym_eigendecompose, Matrix, QuadraticProblem};
use crate::trace::{Recorder, RunOptions, RunOutcome, Status};

/// Fills `out[i] = update(i)` for every `i`.
///
/// Implementations may evaluate coordinates in any order and on any number
/// of workers; `update` only reads an immutable snapshot, so the result must
/// not depend on either.
pub trait SnapshotSweep {
    fn fill(&self, update: &(dyn Fn(usize) -> f64 + Sync), out: &mut [f64]);
}

/// Single-threaded, in index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialSweep;

impl SnapshotSweep for SequentialSweep {
    fn fill(&self, update: &(dyn Fn(usize) -> f64 + Sync), out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = update(i);
        }
    }
}

/// New value of coordinate `i` given the snapshot and `cos(eta_i sqrt(A_ii))`.
#[inline]
pub fn pchd_coordinate_update(p: &QuadraticProblem, snapshot: &[f64], i: usize, cos_i: f64) -> f64 {
    let q = coordinate_target(p, snapshot, i);
    q + cos_i * (snapshot[i] - q)
}

/// Kinetic energy `sum_i v_i^2 / 2` of the per-coordinate flows from a snapshot.
fn snapshot_kinetic(p: &QuadraticProblem, snapshot: &[f64], rsin: &[f64]) -> f64 {
    (0..snapshot.len())
        .map(|i| {
            let v = rsin[i] * (snapshot[i] - coordinate_target(p, snapshot, i));
            0.5 * v * v
        })
        .sum()
}

pub fn pchd_sweep(p: &QuadraticProblem, x_k: &[f64], etas: &[f64]) -> Result<Vec<f64>> {
    pchd_sweep_with(p, x_k, etas, &SequentialSweep)
}

pub fn pchd_sweep_with<S: SnapshotSweep + ?Sized>(
    p: &QuadraticProblem,
    x_k: &[f64],
    etas: &[f64],
    exec: &S,
) -> Result<Vec<f64>> {
    p.check_dim(x_k)?;
    p.check_dim(etas)?;
    if let Some(&bad) = etas.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: bad,
        });
    }
    let (cos, _) = flow_coefficients(p, etas);
    let mut out = alloc::vec![0.0; p.dim()];
    exec.fill(&|i| pchd_coordinate_update(p, x_k, i, cos[i]), &mut out);
    Ok(out)
}

/// `T = I - (I - M) D^-1 A`.
pub fn pchd_iteration_matrix(p: &QuadraticProblem, etas: &[f64]) -> Result<Matrix> {
    p.check_dim(etas)?;
    let (cos, _) = flow_coefficients(p, etas);
    Ok(iteration_matrix_from_cos(p, &cos))
}

fn iteration_matrix_from_cos(p: &QuadraticProblem, cos: &[f64]) -> Matrix {
    let n = p.dim();
    let mut t = Matrix::zeros(n, n);
    for i in 0..n {
        let w = (1.0 - cos[i]) / p.a().get(i, i);
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            t[(i, j)] = delta - w * p.a().get(i, j);
        }
    }
    t
}

/// `rho(T)`. When every `1 - cos_i > 0`, `T` is similar to the symmetric
/// `I - W^1/2 D^-1/2 A D^-1/2 W^1/2` and the symmetric eigensolver is used.
pub fn pchd_spectral_radius(p: &QuadraticProblem, etas: &[f64]) -> Result<f64> {
    p.check_dim(etas)?;
    let (cos, _) = flow_coefficients(p, etas);
    spectral_radius_from_cos(p, &cos)
}

fn spectral_radius_from_cos(p: &QuadraticProblem, cos: &[f64]) -> Result<f64> {
    let n = p.dim();
    if cos.iter().all(|&c| 1.0 - c > 0.0) {
        let scale: Vec<f64> = (0..n)
            .map(|i| libm::sqrt((1.0 - cos[i]) / p.a().get(i, i)))
            .collect();
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                s[(i, j)] = delta - scale[i] * p.a().get(i, j) * scale[j];
            }
        }
        let e = sym_eigendecompose(&s)?;
        Ok(e.min_eigenvalue().abs().max(e.max_eigenvalue().abs()))
    } else {
        spectral_radius(&iteration_matrix_from_cos(p, cos))
    }
}

/// Row-condition certificate for Parallel CHD with times constant in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PchdCertificate {
    /// Every row satisfies `|A_ii (1 + 2 c_i / (1 - c_i))| > sum_{j != i} |A_ij|`
    /// and `c_i > -1`.
    pub holds: bool,
    /// Spectral radius of the iteration matrix, reported regardless of `holds`.
    pub rho: f64,
    /// Left-hand side minus right-hand side of the row condition.
    pub per_row_margin: Vec<f64>,
}

pub fn pchd_convergence_certificate(p: &QuadraticProblem, etas: &[f64]) -> Result<PchdCertificate> {
    check_admissible_row(p, etas)?;
    let (cos, _) = flow_coefficients(p, etas);
    let n = p.dim();
    let per_row_margin: Vec<f64> = (0..n)
        .map(|i| {
            let c = cos[i];
            let aii = p.a().get(i, i);
            let off: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| p.a().get(i, j).abs())
                .sum();
            (aii * (1.0 + 2.0 * c / (1.0 - c))).abs() - off
        })
        .collect();
    let holds = per_row_margin.iter().all(|&m| m > 0.0) && cos.iter().all(|&c| c > -1.0);
    let rho = spectral_radius_from_cos(p, &cos)?;
    Ok(PchdCertificate {
        holds,
        rho,
        per_row_margin,
    })
}

/// Certificate for a schedule; refuses schedules whose rows vary with `k`.
pub fn pchd_certificate_for_schedule(
    p: &QuadraticProblem,
    schedule: &TimeSchedule,
) -> Result<PchdCertificate> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter {
            name: "schedule length",
            value: 0.0,
        });
    }
    if !schedule.is_time_invariant() {
        return Err(Error::TimeVaryingSchedule);
    }
    pchd_convergence_certificate(p, schedule.row(0))
}

pub fn pchd_run(
    p: &QuadraticProblem,
    x1: &[f64],
    schedule: &TimeSchedule,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    pchd_run_with(p, x1, schedule, opts, &SequentialSweep)
}

/// Parallel CHD. Runs are allowed even when `rho >= 1` so divergence can be
/// observed; the trace then carries a note, and iterates blowing past
/// `1e12 (1 + ||x_1||_inf)` end the run with `diverged` set.
pub fn pchd_run_with<S: SnapshotSweep + ?Sized>(
    p: &QuadraticProblem,
    x1: &[f64],
    schedule: &TimeSchedule,
    opts: &RunOptions,
    exec: &S,
) -> Result<RunOutcome> {
    p.check_dim(x1)?;
    if schedule.is_empty() {
        return Err(Error::InvalidParameter {
            name: "schedule length",
            value: 0.0,
        });
    }
    let coeffs: Vec<(Vec<f64>, Vec<f64>)> = (0..schedule.len())
        .map(|k| {
            let row = schedule.row(k);
            check_admissible_row(p, row).map(|_| flow_coefficients(p, row))
        })
        .collect::<Result<_>>()?;

    let mut rec = Recorder::new("pchd", p, x1, opts);
    if schedule.is_time_invariant() {
        let rho = spectral_radius_from_cos(p, &coeffs[0].0)?;
        if rho >= 1.0 {
            rec.note(format!(
                "warning: iteration matrix spectral radius {rho} >= 1"
            ));
        }
    }
    let mut x = x1.to_vec();
    let mut next = alloc::vec![0.0; p.dim()];
    if let Status::Converged = rec.record(0, &x, 0.0)? {
        return Ok(RunOutcome {
            x,
            trace: rec.finish(),
        });
    }
    for k in 0..opts.max_iters {
        let (cos, rsin) = &coeffs[k % coeffs.len()];
        let kinetic = snapshot_kinetic(p, &x, rsin);
        {
            let snapshot = &x;
            exec.fill(
                &|i| pchd_coordinate_update(p, snapshot, i, cos[i]),
                &mut next,
            );
        }
        core::mem::swap(&mut x, &mut next);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chd::{gauss_seidel_times, sor_times};
    use crate::chebyshev::ScheduleKind;
    use crate::linalg::SpdMatrix;
    use alloc::vec;

    fn demo() -> QuadraticProblem {
        let a = SpdMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        QuadraticProblem::new(a, vec![1.0, 2.0]).unwrap()
    }

    fn coupled(b: Vec<f64>) -> QuadraticProblem {
        let a = SpdMatrix::from_rows(&[[1.0, 0.8, 0.8], [0.8, 1.0, 0.8], [0.8, 0.8, 1.0]]).unwrap();
        QuadraticProblem::new(a, b).unwrap()
    }

    #[test]
    fn jacobi_and_weighted_jacobi_sweeps() {
        let p = demo();
        let x = pchd_sweep(&p, &[0.0, 0.0], &gauss_seidel_times(&p)).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 2.0 / 3.0).abs() < 1e-15);
        let x = pchd_sweep(&p, &[0.0, 0.0], &sor_times(&p, 0.5).unwrap()).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
        let xs = p.x_star().to_vec();
        let x = pchd_sweep(&p, &xs, &[0.3, 0.7]).unwrap();
        assert!((x[0] - xs[0]).abs() < 1e-15 && (x[1] - xs[1]).abs() < 1e-15);
    }

    #[test]
    fn iteration_matrices() {
        let p = demo();
        let t = pchd_iteration_matrix(&p, &gauss_seidel_times(&p)).unwrap();
        // I - D^-1 A
        let expected = Matrix::from_rows(&[[0.0, -0.5], [-1.0 / 3.0, 0.0]]).unwrap();
        assert!(t.sub(&expected).unwrap().max_abs() < 1e-15);

        // cos = 1 at eta = 2 pi / sqrt(A_ii)
        let etas = [
            2.0 * core::f64::consts::PI / libm::sqrt(2.0),
            2.0 * core::f64::consts::PI / libm::sqrt(3.0),
        ];
        let t = pchd_iteration_matrix(&p, &etas).unwrap();
        assert!(t.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);

        let p = coupled(vec![0.0; 3]);
        let etas = sor_times(&p, 0.5).unwrap();
        let t = pchd_iteration_matrix(&p, &etas).unwrap();
        let expected = Matrix::identity(3).sub(&p.a().matrix().scale(0.5)).unwrap();
        assert!(t.sub(&expected).unwrap().max_abs() < 1e-15);
        assert!((pchd_spectral_radius(&p, &etas).unwrap() - 0.9).abs() < 1e-12);
        assert!((spectral_radius(&t).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn certificates() {
        let p = demo();
        let c = pchd_convergence_certificate(&p, &gauss_seidel_times(&p)).unwrap();
        assert!(c.holds && c.rho < 1.0);
        assert!((c.per_row_margin[0] - 1.0).abs() < 1e-15);

        let p = coupled(vec![1.0, 0.0, 0.0]);
        let c = pchd_convergence_certificate(&p, &gauss_seidel_times(&p)).unwrap();
        assert!(!c.holds);
        assert!((c.rho - 1.6).abs() < 1e-12);

        let c = pchd_convergence_certificate(&p, &sor_times(&p, 0.5).unwrap()).unwrap();
        assert!(c.holds);
        assert!((c.rho - 0.9).abs() < 1e-12);
        // 3 - 1.6
        assert!((c.per_row_margin[2] - 1.4).abs() < 1e-12);

        let bad = [core::f64::consts::PI, 1.0, 1.0];
        assert!(matches!(
            pchd_convergence_certificate(&p, &bad),
            Err(Error::InadmissibleTime { coordinate: 0, .. })
        ));
    }

    #[test]
    fn certificate_refuses_time_varying() {
        let p = demo();
        let s =
            TimeSchedule::coordinate_rows(ScheduleKind::Custom, &[vec![1.0, 1.0], vec![0.5, 1.0]])
                .unwrap();
        assert_eq!(
            pchd_certificate_for_schedule(&p, &s),
            Err(Error::TimeVaryingSchedule)
        );
    }

    #[test]
    fn runs_converge_and_diverge() {
        let p = coupled(vec![1.0, 2.0, 3.0]);
        let jac = TimeSchedule::constant_row(ScheduleKind::SorEquivalent, gauss_seidel_times(&p))
            .unwrap();
        let out = pchd_run(&p, &[0.0; 3], &jac, &RunOptions::iterations(1000)).unwrap();
        assert!(out.diverged());
        assert!(!out.trace.notes.is_empty());

        let w =
            TimeSchedule::constant_row(ScheduleKind::SorEquivalent, sor_times(&p, 0.5).unwrap())
                .unwrap();
        let out = pchd_run(
            &p,
            &[0.0; 3],
            &w,
            &RunOptions::iterations(175).with_tol(1e-8),
        )
        .unwrap();
        assert!(!out.diverged());
        assert!(out.trace.last().unwrap().residual_inf < 1e-8);

        let out = pchd_run(
            &p,
            p.x_star(),
            &w,
            &RunOptions::iterations(5).with_tol(1e-12),
        )
        .unwrap();
        assert_eq!(out.trace.rows.len(), 1);
    }
}
