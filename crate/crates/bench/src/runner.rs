//! Dispatch from a [`RunConfig`] to the solvers, plus `compare`.

use std::fmt;
use std::num::NonZeroUsize;
use std::sync::OnceLock;
use std::time::Instant;

use hd_core::baselines::{cg_run, chebyshev_method_run, gd_run};
use hd_core::chd::{chd_run, gauss_seidel_times, rchd_run, sor_times, RchdConfig};
use hd_core::chebyshev::{
    hd_schedule, worst_case_bound, Permutation, ScheduleKind, SpectrumBounds, TimeSchedule,
};
use hd_core::general::{
    leapfrog, minimize_reference, ExpLoss, QuadraticObjective, RegularizedLogSumExp,
    SmoothObjective,
};
use hd_core::hd::hd_run_with;
use hd_core::linalg::{dist2, norm_inf};
use hd_core::pchd::{pchd_convergence_certificate, pchd_run_with};
use hd_core::trace::DIVERGENCE_FACTOR;
use hd_core::{
    ConvergenceTrace, Matrix, PhaseState, QuadraticProblem, RunOptions, RunOutcome, TraceRow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{Method, ObjectiveName, PermSpec, RunConfig, ScheduleSpec};
use crate::error::{BenchError, Result};
use crate::parallel::ThreadedSweep;
use crate::trace_csv::{fmt_f64, format_trace, header_for};

/// Nanoseconds since the first call in this process.
pub fn monotonic_ns() -> u64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_nanos() as u64
}

/// Result of one `solve`.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub config: RunConfig,
    pub x: Vec<f64>,
    pub trace: ConvergenceTrace,
    pub summary: Summary,
}

impl BenchReport {
    pub fn trace_text(&self, problem_hash: &str) -> String {
        let header = header_for(&self.trace, problem_hash, self.config.echo());
        format_trace(&header, &self.trace.rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: Method,
    pub iterations: usize,
    pub residual_inf: f64,
    pub dist_to_opt: f64,
    pub f_gap: f64,
    pub diverged: bool,
    /// `|x_{K+1} - x_*| / (worst_case_bound(kappa, K) |x_1 - x_*|)` for `hd`
    /// with a Chebyshev schedule that ran to completion.
    pub beat_ratio: Option<f64>,
    /// Spectral radius of the Parallel CHD iteration matrix.
    pub rho: Option<f64>,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "method={} iterations={} residual_inf={:e} dist_to_opt={:e} f_gap={:e} diverged={}",
            self.method,
            self.iterations,
            self.residual_inf,
            self.dist_to_opt,
            self.f_gap,
            self.diverged
        )?;
        if let Some(r) = self.rho {
            write!(f, " rho={r}")?;
        }
        if let Some(b) = self.beat_ratio {
            write!(f, " beat_ratio={b}")?;
        }
        Ok(())
    }
}

fn bounds_for(cfg: &RunConfig, p: &QuadraticProblem) -> Result<SpectrumBounds> {
    let (m, l) = match (cfg.m, cfg.l) {
        (Some(m), Some(l)) => (m, l),
        _ => (p.a().lambda_min(), p.a().lambda_max()),
    };
    Ok(SpectrumBounds::new(m, l)?)
}

fn permutation(spec: PermSpec, k: usize) -> Permutation {
    match spec {
        PermSpec::Identity => Permutation::identity(k),
        PermSpec::Reversed => Permutation::reversed(k),
        PermSpec::Random(seed) => Permutation::random(k, seed),
    }
}

/// Per-coordinate time row for the coordinate methods.
pub fn coordinate_times(cfg: &RunConfig, p: &QuadraticProblem) -> Result<(ScheduleKind, Vec<f64>)> {
    let d = p.dim();
    Ok(match cfg.method {
        Method::Gs | Method::Jacobi => (ScheduleKind::SorEquivalent, gauss_seidel_times(p)),
        _ => match (cfg.schedule, cfg.eta, cfg.relaxation()) {
            (Some(ScheduleSpec::Constant(v)), _, _) | (None, Some(v), _) => {
                (ScheduleKind::Constant, vec![v; d])
            }
            (_, _, Some(c)) => (ScheduleKind::SorEquivalent, sor_times(p, c)?),
            _ => (ScheduleKind::SorEquivalent, gauss_seidel_times(p)),
        },
    })
}

fn finish(
    cfg: &RunConfig,
    out: RunOutcome,
    beat_ratio: Option<f64>,
    rho: Option<f64>,
) -> BenchReport {
    let last = out.trace.last().copied();
    let summary = Summary {
        method: cfg.method,
        iterations: out.trace.iterations(),
        residual_inf: last.map_or(f64::NAN, |r| r.residual_inf),
        dist_to_opt: last.map_or(f64::NAN, |r| r.dist_to_opt),
        f_gap: last.map_or(f64::NAN, |r| r.f_gap),
        diverged: out.trace.diverged,
        beat_ratio,
        rho,
    };
    BenchReport {
        config: cfg.clone(),
        x: out.x,
        trace: out.trace,
        summary,
    }
}

/// Runs `cfg` on `p` from `x1`. `clock` fills the `wallclock_ns` column.
pub fn run_benchmark(
    cfg: &RunConfig,
    p: &QuadraticProblem,
    x1: &[f64],
    clock: Option<fn() -> u64>,
) -> Result<BenchReport> {
    cfg.validate()?;
    if cfg.method != Method::HdGeneral && x1.len() != p.dim() {
        return Err(BenchError::config(format!(
            "starting point has {} entries, problem dimension is {}",
            x1.len(),
            p.dim()
        )));
    }
    let mut opts = RunOptions::iterations(cfg.iterations);
    opts.stop_tol = cfg.tol;
    opts.clock = clock;

    match cfg.method {
        Method::Hd => {
            let k = cfg.iterations;
            let (sched, bounds) = match cfg.schedule.or(cfg.eta.map(ScheduleSpec::Constant)) {
                Some(ScheduleSpec::Constant(v)) => (
                    TimeSchedule::scalar(ScheduleKind::Constant, vec![v; k])?,
                    None,
                ),
                _ => {
                    let b = bounds_for(cfg, p)?;
                    (hd_schedule(b, k, &permutation(cfg.perm, k))?, Some(b))
                }
            };
            let out = hd_run_with(p, x1, &sched, &opts)?;
            let outcome = RunOutcome {
                x: out.x,
                trace: out.trace,
            };
            let beat = match bounds {
                Some(b) if b.m() < b.l() && k > 0 && outcome.trace.iterations() == k => {
                    let before = dist2(x1, p.x_star());
                    let after = dist2(&outcome.x, p.x_star());
                    Some(after / (worst_case_bound(b.kappa(), k)? * before))
                }
                _ => None,
            };
            Ok(finish(cfg, outcome, beat, None))
        }
        Method::Chd | Method::Gs | Method::Sor => {
            let (kind, row) = coordinate_times(cfg, p)?;
            let sched = TimeSchedule::constant_row(kind, row)?;
            let mut out = chd_run(p, x1, &sched, &opts)?;
            out.trace.method = cfg.method.to_string();
            Ok(finish(cfg, out, None, None))
        }
        Method::Pchd | Method::Jacobi | Method::Wjacobi => {
            let (kind, row) = coordinate_times(cfg, p)?;
            let cert = pchd_convergence_certificate(p, &row)?;
            let sched = TimeSchedule::constant_row(kind, row)?;
            let exec = ThreadedSweep::new(NonZeroUsize::new(cfg.workers).expect("validated"));
            let mut out = pchd_run_with(p, x1, &sched, &opts, &exec)?;
            out.trace.method = cfg.method.to_string();
            out.trace.notes.push(format!(
                "certificate holds={} rho={:.17e}",
                cert.holds, cert.rho
            ));
            Ok(finish(cfg, out, None, Some(cert.rho)))
        }
        Method::Rchd => {
            let (_, row) = coordinate_times(cfg, p)?;
            let rc = RchdConfig::new(p, row, cfg.seed, cfg.iterations)?;
            let out = rchd_run(p, x1, &rc, &opts)?;
            Ok(finish(cfg, out, None, None))
        }
        Method::Chebyshev => {
            let out = chebyshev_method_run(p, x1, bounds_for(cfg, p)?, &opts)?;
            Ok(finish(cfg, out, None, None))
        }
        Method::Cg => Ok(finish(cfg, cg_run(p, x1, &opts)?, None, None)),
        Method::Gd => {
            let step = cfg.step.unwrap_or(1.0 / p.a().lambda_max());
            Ok(finish(cfg, gd_run(p, x1, step, &opts)?, None, None))
        }
        Method::HdGeneral => run_general(cfg, p, x1, clock),
    }
}

/// Seeded feature matrix (`2d x d`, standard normal) for the log-sum-exp objective.
pub fn log_sum_exp_objective(dim: usize, seed: u64, mu: f64) -> Result<RegularizedLogSumExp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..2 * dim * dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(RegularizedLogSumExp::new(
        Matrix::from_row_major(2 * dim, dim, data)?,
        mu,
    )?)
}

/// `exp(-x)` restricted to `x >= 0`, where it is `1`-smooth.
struct ExpLossOnHalfLine;

impl SmoothObjective for ExpLossOnHalfLine {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &[f64]) -> f64 {
        ExpLoss.value(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        ExpLoss.gradient(x, grad)
    }
    fn smoothness(&self) -> Option<f64> {
        Some(1.0)
    }
}

fn run_general(
    cfg: &RunConfig,
    p: &QuadraticProblem,
    x1: &[f64],
    clock: Option<fn() -> u64>,
) -> Result<BenchReport> {
    let (obj, x_star, f_star): (Box<dyn SmoothObjective>, Option<Vec<f64>>, f64) =
        match cfg.objective {
            ObjectiveName::Quadratic => (
                Box::new(QuadraticObjective(p.clone())),
                Some(p.x_star().to_vec()),
                p.f_star(),
            ),
            ObjectiveName::RegularizedLogSumExp => {
                let obj = log_sum_exp_objective(p.dim(), cfg.seed, cfg.mu)?;
                let xs = minimize_reference(&obj, &vec![0.0; p.dim()], 1e-12, 10_000_000)?;
                let fs = obj.value(&xs);
                (Box::new(obj), Some(xs), fs)
            }
            ObjectiveName::ExpLoss => {
                if x1.len() != 1 || x1[0] < 0.0 {
                    return Err(BenchError::config(
                        "exp-loss is one-dimensional and starts at x >= 0",
                    ));
                }
                (Box::new(ExpLossOnHalfLine), None, 0.0)
            }
        };
    if x1.len() != obj.dim() {
        return Err(BenchError::config(format!(
            "starting point has {} entries, objective dimension is {}",
            x1.len(),
            obj.dim()
        )));
    }
    let l = obj.smoothness().expect("every objective here is smooth");
    let eta = 1.0 / (2.0 * l.sqrt());
    let h = eta / cfg.steps_per_flow as f64;
    let limit = DIVERGENCE_FACTOR * (1.0 + norm_inf(x1));
    let start = clock.map_or(0, |c| c());

    let mut trace = ConvergenceTrace::new(Method::HdGeneral.name());
    if x_star.is_none() {
        trace
            .notes
            .push("objective has no minimizer; f_gap is measured against the infimum 0".into());
    }
    let mut x = x1.to_vec();
    let mut grad = vec![0.0; x.len()];
    let mut kinetic = 0.0;
    for k in 0..=cfg.iterations {
        if k > 0 {
            let state = leapfrog(obj.as_ref(), &PhaseState::at_rest(x), h, cfg.steps_per_flow)?;
            kinetic = state.kinetic_energy();
            x = state.x;
        }
        let value = obj.value(&x);
        obj.gradient(&x, &mut grad);
        let residual_inf = norm_inf(&grad);
        trace.rows.push(TraceRow {
            k,
            f_gap: value - f_star,
            dist_to_opt: x_star.as_deref().map_or(f64::NAN, |xs| dist2(&x, xs)),
            residual_inf,
            hamiltonian: value + kinetic,
            kinetic,
            wallclock_ns: clock.map_or(0, |c| c().saturating_sub(start)),
        });
        if !x.iter().all(|v| v.is_finite()) || norm_inf(&x) > limit {
            trace.diverged = true;
            break;
        }
        if cfg.tol.is_some_and(|t| residual_inf <= t) {
            break;
        }
    }
    Ok(finish(cfg, RunOutcome { x, trace }, None, None))
}

/// Runs every method in `methods` on the same problem concurrently, in
/// input order.
pub fn compare(
    base: &RunConfig,
    methods: &[Method],
    p: &QuadraticProblem,
    x1: &[f64],
    clock: Option<fn() -> u64>,
) -> Result<Vec<BenchReport>> {
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].contains(m) {
            return Err(BenchError::config(format!("method '{m}' listed twice")));
        }
    }
    let configs: Vec<RunConfig> = methods
        .iter()
        .map(|&method| RunConfig {
            method,
            ..base.clone()
        })
        .collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| s.spawn(move || run_benchmark(cfg, p, x1, clock)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    })
}

/// Wide CSV with `k` and, per method, `f_gap`, `dist_to_opt` and
/// `residual_inf` columns. Methods that stopped early leave blanks.
pub fn merged_csv(reports: &[BenchReport], problem_hash: &str) -> String {
    let mut s = format!("# problem_sha256: {problem_hash}\n");
    let names: Vec<String> = reports
        .iter()
        .map(|r| r.config.method.to_string())
        .collect();
    s.push_str(&format!("# methods: {}\n", names.join(",")));
    s.push('k');
    for n in &names {
        for col in ["f_gap", "dist_to_opt", "residual_inf"] {
            s.push_str(&format!(",{n}_{col}"));
        }
    }
    s.push('\n');
    let rows = reports
        .iter()
        .map(|r| r.trace.rows.len())
        .max()
        .unwrap_or(0);
    for k in 0..rows {
        s.push_str(&k.to_string());
        for r in reports {
            match r.trace.rows.get(k) {
                Some(row) => {
                    for v in [row.f_gap, row.dist_to_opt, row.residual_inf] {
                        s.push(',');
                        fmt_f64(&mut s, v);
                    }
                }
                None => s.push_str(",,,"),
            }
        }
        s.push('\n');
    }
    s
}
