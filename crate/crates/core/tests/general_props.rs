mod common;

use common::*;
use hd_core::chebyshev::{ScheduleKind, TimeSchedule};
use hd_core::general::{
    exp_flow, exp_gradient_flow, hd_general_run, leapfrog, minimize_reference, ExpLoss,
    QuadraticObjective, RegularizedLogSumExp, SmoothObjective,
};
use hd_core::hd::hd_run;
use hd_core::linalg::Matrix;
use hd_core::{PhaseState, QuadraticProblem, SpdMatrix};
use proptest::prelude::*;

fn lse(seed: u64, rows: usize, d: usize, mu: f64) -> RegularizedLogSumExp {
    let mut r = rng(seed);
    let z = Matrix::from_row_major(
        rows,
        d,
        random_vec(&mut r, rows * d)
            .iter()
            .map(|v| 2.0 * v)
            .collect(),
    )
    .unwrap();
    RegularizedLogSumExp::new(z, mu).unwrap()
}

fn check_gradient<O: SmoothObjective>(obj: &O, x: &[f64]) -> Result<(), TestCaseError> {
    let mut g = vec![0.0; x.len()];
    obj.gradient(x, &mut g);
    let h = 1e-6;
    for i in 0..x.len() {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[i] += h;
        xm[i] -= h;
        let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * h);
        prop_assert!(
            (fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()),
            "coord {}: {} vs {}",
            i,
            fd,
            g[i]
        );
    }
    Ok(())
}

fn energy<O: SmoothObjective>(obj: &O, s: &PhaseState) -> f64 {
    obj.value(&s.x) + s.kinetic_energy()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gradients_match_finite_differences(seed in any::<u64>(), d in 1usize..=8, rows in 1usize..=10) {
        let x = random_vec(&mut rng(seed ^ 1), d);
        check_gradient(&lse(seed, rows, d, 0.3), &x)?;
        check_gradient(&QuadraticObjective(random_problem(seed, d, 20.0)), &x)?;
        check_gradient(&ExpLoss, &x[..1])?;
    }

    #[test]
    fn exp_flow_solves_the_ode(x0 in -5.0f64..5.0, t in 0.01f64..20.0) {
        let dt = 1e-6;
        let (x, v) = exp_flow(x0, t);
        let (xp, vp) = exp_flow(x0, t + dt);
        let (xm, vm) = exp_flow(x0, t - dt);
        let dx = (xp - xm) / (2.0 * dt);
        let dv = (vp - vm) / (2.0 * dt);
        prop_assert!((dx - v).abs() <= 1e-5 * (1.0 + v.abs()));
        prop_assert!((dv - (-x).exp()).abs() <= 1e-5 * (1.0 + (-x).exp()));
        // terminal speed, up to the last ulp of exp
        let top = (2.0 * (-x0).exp()).sqrt() * (1.0 + 1e-15);
        prop_assert!(v >= 0.0 && v <= top);
    }

    #[test]
    fn gradient_flow_increases(x0 in -5.0f64..5.0, t in 0.0f64..1e6, dt in 1e-3f64..10.0) {
        prop_assert!(exp_gradient_flow(x0, t + dt) > exp_gradient_flow(x0, t));
    }

    #[test]
    fn leapfrog_is_reversible(seed in any::<u64>(), d in 1usize..=6, n in 1usize..=400) {
        let obj = lse(seed, 5, d, 0.5);
        let mut r = rng(seed ^ 2);
        let start = PhaseState::new(random_vec(&mut r, d), random_vec(&mut r, d)).unwrap();
        let fwd = leapfrog(&obj, &start, 0.01, n).unwrap();
        let flipped = PhaseState::new(fwd.x.clone(), fwd.v.iter().map(|v| -v).collect()).unwrap();
        let back = leapfrog(&obj, &flipped, 0.01, n).unwrap();
        prop_assert!(max_abs_diff(&back.x, &start.x) <= 1e-10);
        prop_assert!(max_abs_diff(&back.v.iter().map(|v| -v).collect::<Vec<_>>(), &start.v) <= 1e-10);
    }

    #[test]
    fn exact_flow_contraction_bound(seed in any::<u64>(), d in 1usize..=15, logk in 0.0f64..3.0) {
        let p = random_problem(seed, d, 10f64.powf(logk));
        let (m, l) = (p.a().lambda_min(), p.a().lambda_max());
        let eta = 1.0 / (2.0 * l.sqrt());
        let x1 = random_vec(&mut rng(seed ^ 3), d);
        let d1 = norm(&sub(&x1, p.x_star())).powi(2);
        let out = hd_run(&p, &x1, &TimeSchedule::scalar(ScheduleKind::Constant, vec![eta; 50]).unwrap()).unwrap();
        for (k, row) in out.trace.rows.iter().enumerate() {
            let bound = (1.0 - m / (16.0 * l)).powi(k as i32) * d1;
            prop_assert!(row.dist_to_opt.powi(2) <= bound * (1.0 + 1e-12) + 1e-28);
        }
    }
}

#[test]
fn leapfrog_energy_band_without_drift() {
    let p = QuadraticProblem::new(SpdMatrix::from_diagonal(&[4.0]).unwrap(), vec![0.0]).unwrap();
    let obj = QuadraticObjective(p);
    let h = 1e-2;
    let mut s = PhaseState::at_rest(vec![1.0]);
    let h0 = energy(&obj, &s);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for block in 0..1000 {
        s = leapfrog(&obj, &s, h, 100).unwrap();
        let dev = (energy(&obj, &s) - h0).abs();
        if block < 500 {
            first = first.max(dev);
        } else {
            second = second.max(dev);
        }
    }
    // kick-drift-kick on omega = 2: |H - H0| <= (omega h)^2 H0 / 4 in the band
    let band = (2.0 * h).powi(2) * h0 / 4.0;
    assert!(first <= band && second <= band, "{first} {second} {band}");
    assert!(second <= 1.1 * first);
}

#[test]
fn leapfrog_matches_exp_flow() {
    let s = leapfrog(&ExpLoss, &PhaseState::at_rest(vec![0.0]), 1e-4, 10_000).unwrap();
    let (x, v) = exp_flow(0.0, 1.0);
    assert!((s.x[0] - x).abs() < 1e-6 && (s.v[0] - v).abs() < 1e-6);
}

#[test]
fn general_run_on_quadratic_respects_bound() {
    for seed in 0..10 {
        let p = random_problem(seed, 6, 50.0);
        let (m, l) = (p.a().lambda_min(), p.a().lambda_max());
        let xs = p.x_star().to_vec();
        let obj = QuadraticObjective(p);
        let run = hd_general_run(&obj, &[1.0; 6], 20, 64, Some(&xs)).unwrap();
        for r in run.contraction_ratios() {
            assert!(r <= 1.0 - m / (16.0 * l) + 1e-3);
        }
    }
}

#[test]
fn general_run_on_log_sum_exp_respects_bound_with_slack() {
    for seed in 0..10 {
        let obj = lse(seed, 8, 4, 0.2);
        let (m, l) = (obj.strong_convexity().unwrap(), obj.smoothness().unwrap());
        let xs = minimize_reference(&obj, &[0.0; 4], 1e-13, 1_000_000).unwrap();
        let steps = 64;
        let run = hd_general_run(&obj, &[2.0, -1.0, 0.5, 1.0], 30, steps, Some(&xs)).unwrap();
        let h = run.eta / steps as f64;
        // discretization slack C L h^2 with C = 1
        let slack = l * h * h;
        for (k, r) in run.contraction_ratios().into_iter().enumerate() {
            if run.dist_sq[k] > 1e-20 {
                assert!(r <= 1.0 - m / (16.0 * l) + slack, "seed {seed} k {k}: {r}");
            }
        }
        assert!(run.values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
