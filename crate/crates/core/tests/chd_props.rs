#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use hd_core::chd::{
    chd_coordinate_step, chd_run, chd_sweep, gauss_seidel_times, rchd_run, sor_time, sor_times,
    RchdConfig,
};
use hd_core::chebyshev::{ScheduleKind, TimeSchedule};
use hd_core::{Error, QuadraticProblem, RunOptions};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

/// Textbook SOR sweep, written from the relaxation formula
/// `x_i <- (1 - c) x_i + c (b_i - sum_{j<i} a_ij x_j - sum_{j>i} a_ij x_j) / a_ii`.
fn textbook_sor(p: &QuadraticProblem, x: &[f64], c: f64) -> Vec<f64> {
    let n = x.len();
    let mut y = x.to_vec();
    for i in 0..n {
        let mut s = p.b()[i];
        for j in 0..n {
            if j != i {
                s -= p.a().get(i, j) * y[j];
            }
        }
        y[i] = (1.0 - c) * y[i] + c * s / p.a().get(i, i);
    }
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_seidel_and_sor_equivalence(seed in any::<u64>(), d in 1usize..=30, ci in 0usize..5) {
        let c = [0.5, 1.0, 1.3, 1.9, 1.0][ci];
        let p = random_problem(seed, d, 100.0);
        let times = if ci == 4 { gauss_seidel_times(&p) } else { sor_times(&p, c).unwrap() };
        let mut x = random_vec(&mut rng(seed ^ 7), d);
        let mut y = x.clone();
        for _ in 0..10 {
            x = chd_sweep(&p, &x, &times).unwrap().0;
            y = textbook_sor(&p, &y, c);
            prop_assert!(max_abs_diff(&x, &y) <= 1e-12);
        }
    }

    #[test]
    fn energy_telescopes_across_sweep(seed in any::<u64>(), d in 1usize..=25, row in prop::collection::vec(0.05f64..4.0, 25)) {
        let p = random_problem(seed, d, 300.0);
        let x = random_vec(&mut rng(seed ^ 8), d);
        let times = &row[..d];
        let (next, kinetic) = chd_sweep(&p, &x, times).unwrap();
        let f0 = p.value(&x).unwrap();
        let f1 = p.value(&next).unwrap();
        prop_assert!((f0 - f1 - kinetic).abs() <= 1e-9 * (1.0 + f0.abs()));
        prop_assert!(f1 <= f0 + 1e-12 * (1.0 + f0.abs()));

        // coordinate by coordinate
        let mut z = x.clone();
        let mut total = 0.0;
        for (i, &eta) in times.iter().enumerate() {
            let before = p.value(&z).unwrap();
            let s = chd_coordinate_step(&p, &z, i, eta).unwrap();
            z[i] = s.x_new_i;
            let k = 0.5 * s.v_new_i * s.v_new_i;
            prop_assert!((before - p.value(&z).unwrap() - k).abs() <= 1e-9 * (1.0 + before.abs()));
            total += k;
        }
        prop_assert!((total - kinetic).abs() <= 1e-12 * (1.0 + kinetic));
    }

    #[test]
    fn zero_kinetic_sweep_means_solved(seed in any::<u64>(), d in 1usize..=20) {
        let p = random_problem(seed, d, 50.0);
        let (x, kinetic) = chd_sweep(&p, p.x_star(), &gauss_seidel_times(&p)).unwrap();
        prop_assert!(kinetic <= 1e-20);
        let scale = 1.0 + hd_core::linalg::norm_inf(p.b());
        prop_assert!(hd_core::linalg::norm_inf(&p.residual(&x).unwrap()) <= 1e-8 * scale);
    }

    #[test]
    fn random_admissible_times_converge(seed in any::<u64>(), d in 1usize..=20) {
        let p = random_problem(seed, d, 30.0);
        let mut r = rng(seed ^ 9);
        let x1 = random_vec(&mut r, d);
        // eta sqrt(A_ii) uniform in [0.2, pi - 0.2]
        let row: Vec<f64> = (0..d)
            .map(|i| r.random_range(0.2..PI - 0.2) / p.a().get(i, i).sqrt())
            .collect();
        let sched = TimeSchedule::constant_row(ScheduleKind::Custom, row).unwrap();
        let out = chd_run(&p, &x1, &sched, &RunOptions::iterations(100_000).with_tol(1e-8)).unwrap();
        prop_assert!(out.trace.last().unwrap().residual_inf < 1e-8);
        let gaps: Vec<f64> = out.trace.rows.iter().map(|r| r.f_gap).collect();
        prop_assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0])));
    }
}

#[test]
fn sine_zero_times_rejected_before_iterating() {
    let p = random_problem(11, 4, 10.0);
    let mut row = gauss_seidel_times(&p);
    row[2] = PI / p.a().get(2, 2).sqrt();
    let sched = TimeSchedule::constant_row(ScheduleKind::Custom, row.clone()).unwrap();
    let err = chd_run(&p, &[0.0; 4], &sched, &RunOptions::iterations(10)).unwrap_err();
    assert!(matches!(err, Error::InadmissibleTime { coordinate: 2, .. }));
    row[2] = 2.0 * PI / p.a().get(2, 2).sqrt() + 5e-10;
    let sched = TimeSchedule::constant_row(ScheduleKind::Custom, row).unwrap();
    assert!(chd_run(&p, &[0.0; 4], &sched, &RunOptions::iterations(10)).is_err());
}

#[test]
fn sor_time_range() {
    for c in [0.0, 2.0, -0.1, 2.5] {
        assert!(sor_time(c, 1.0).is_err());
    }
    let eta = sor_time(1e-9, 3.0).unwrap();
    assert!(eta > 0.0 && eta < 1e-4);
}

#[test]
fn randomized_runs_are_reproducible() {
    let p = random_problem(5, 6, 20.0);
    let cfg = RchdConfig::new(&p, gauss_seidel_times(&p), 42, 500).unwrap();
    let x1 = vec![1.0; 6];
    let a = rchd_run(&p, &x1, &cfg, &RunOptions::iterations(500)).unwrap();
    let b = rchd_run(&p, &x1, &cfg, &RunOptions::iterations(500)).unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.trace, b.trace);
    let other = RchdConfig { seed: 43, ..cfg };
    let c = rchd_run(&p, &x1, &other, &RunOptions::iterations(500)).unwrap();
    assert_ne!(a.x, c.x);
}

#[test]
fn randomized_single_coordinate_is_deterministic_chd() {
    let a = hd_core::SpdMatrix::from_diagonal(&[3.0]).unwrap();
    let p = QuadraticProblem::new(a, vec![1.5]).unwrap();
    let eta = sor_time(1.4, 3.0).unwrap();
    let cfg = RchdConfig::new(&p, vec![eta], 9, 5).unwrap();
    let r = rchd_run(&p, &[2.0], &cfg, &RunOptions::iterations(5)).unwrap();
    let sched = TimeSchedule::constant_row(ScheduleKind::SorEquivalent, vec![eta]).unwrap();
    let d = chd_run(&p, &[2.0], &sched, &RunOptions::iterations(5)).unwrap();
    assert_eq!(r.x, d.x);
}
