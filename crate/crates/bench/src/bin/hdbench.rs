use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hd_bench::config::{Method, ObjectiveName, PermSpec, RunConfig, ScheduleSpec};
use hd_bench::error::{BenchError, Result};
use hd_bench::mm::write_matrix_market;
use hd_bench::problems::{gen_problem, problem_hash, ProblemKind, ProblemSpec};
use hd_bench::runner::{compare, merged_csv, monotonic_ns, run_benchmark};
use hd_bench::vector_io::{read_vector, write_vector};

const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hdbench",
    version,
    about = "Hamiltonian Descent benchmarks for A x = b"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem and write A.mtx and b.txt.
    Gen {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one method and print a summary line.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
        /// hd, chd, gs, sor, jacobi, wjacobi, pchd, rchd, chebyshev, cg, gd or hd-general.
        #[arg(long)]
        method: Method,
        /// Trace CSV destination.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run several methods on one problem and write a merged CSV.
    Compare {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated method tags.
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<Method>,
        #[arg(long)]
        out: PathBuf,
        /// Also write one trace per method here.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// spd-spectrum, ridge, poisson1d, tridiag-toeplitz or file.
    #[arg(long, default_value = "spd-spectrum")]
    kind: ProblemKind,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 100.0)]
    kappa: f64,
    /// Explicit eigenvalues, comma-separated.
    #[arg(long, value_delimiter = ',')]
    spectrum: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    gamma: f64,
    /// Ridge sample count; defaults to 2 * dim.
    #[arg(long)]
    samples: Option<usize>,
    /// Matrix Market file for `--kind file`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Right-hand side file, one value per line.
    #[arg(long)]
    rhs: Option<PathBuf>,
}

impl ProblemArgs {
    fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            kind: self.kind,
            dim: self.dim,
            kappa: self.kappa,
            spectrum: self.spectrum.clone(),
            seed: self.seed,
            gamma: self.gamma,
            samples: self.samples,
            matrix: self.matrix.clone(),
            rhs: self.rhs.clone(),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Iteration budget.
    #[arg(long = "K", default_value_t = 100)]
    iterations: usize,
    /// Stop once the residual sup-norm drops below this.
    #[arg(long)]
    tol: Option<f64>,
    /// Relaxation factor in (0, 2).
    #[arg(long)]
    c: Option<f64>,
    /// Constant integration time.
    #[arg(long)]
    eta: Option<f64>,
    /// Gradient descent step; defaults to 1/lambda_max.
    #[arg(long)]
    step: Option<f64>,
    /// chebyshev, constant:ETA or sor:C.
    #[arg(long)]
    schedule: Option<ScheduleSpec>,
    /// identity, reversed or random:SEED.
    #[arg(long, default_value = "identity")]
    perm: PermSpec,
    /// Seed for randomized coordinate choice and generated objectives.
    #[arg(long = "run-seed", default_value_t = 0)]
    run_seed: u64,
    /// Spectrum bounds for hd and chebyshev; exact eigenvalues when omitted.
    #[arg(long)]
    m: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    /// Leapfrog substeps per hd-general iteration.
    #[arg(long, default_value_t = 64)]
    steps_per_flow: usize,
    /// hd-general objective: quadratic, exp-loss or regularized-log-sum-exp.
    #[arg(long, default_value = "quadratic")]
    objective: ObjectiveName,
    /// Regularization of the log-sum-exp objective.
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    /// Threads for parallel CHD sweeps.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Starting point; zeros when omitted.
    #[arg(long)]
    x1: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self, method: Method) -> RunConfig {
        RunConfig {
            tol: self.tol,
            c: self.c,
            eta: self.eta,
            step: self.step,
            schedule: self.schedule,
            perm: self.perm,
            seed: self.run_seed,
            m: self.m,
            l: self.l,
            steps_per_flow: self.steps_per_flow,
            objective: self.objective,
            mu: self.mu,
            workers: self.workers,
            ..RunConfig::new(method, self.iterations)
        }
    }

    fn start(&self, dim: usize) -> Result<Vec<f64>> {
        match &self.x1 {
            Some(path) => read_vector(path),
            None if self.objective == ObjectiveName::ExpLoss => Ok(vec![0.0]),
            None => Ok(vec![0.0; dim]),
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { problem, out } => {
            let p = gen_problem(&problem.spec())?;
            create_dir(&out)?;
            write_matrix_market(&out.join("A.mtx"), p.a().matrix())?;
            write_vector(&out.join("b.txt"), p.b())?;
            println!(
                "wrote {} (dim={} sha256={})",
                out.display(),
                p.dim(),
                problem_hash(&p)
            );
            Ok(false)
        }
        Command::Solve {
            problem,
            run,
            method,
            trace,
        } => {
            let p = gen_problem(&problem.spec())?;
            let x1 = run.start(p.dim())?;
            let report = run_benchmark(&run.config(method), &p, &x1, Some(monotonic_ns))?;
            if let Some(path) = trace {
                write_text(&path, &report.trace_text(&problem_hash(&p)))?;
            }
            println!("{}", report.summary);
            Ok(report.summary.diverged)
        }
        Command::Compare {
            problem,
            run,
            methods,
            out,
            trace_dir,
        } => {
            let p = gen_problem(&problem.spec())?;
            let x1 = run.start(p.dim())?;
            let hash = problem_hash(&p);
            let reports = compare(
                &run.config(methods[0]),
                &methods,
                &p,
                &x1,
                Some(monotonic_ns),
            )?;
            write_text(&out, &merged_csv(&reports, &hash))?;
            if let Some(dir) = trace_dir {
                create_dir(&dir)?;
                for r in &reports {
                    write_text(
                        &dir.join(format!("{}.csv", r.config.method)),
                        &r.trace_text(&hash),
                    )?;
                }
            }
            for r in &reports {
                println!("{}", r.summary);
            }
            Ok(reports.iter().any(|r| r.summary.diverged))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_DIVERGED),
        Err(e) => {
            eprintln!("hdbench: {e}");
            ExitCode::FAILURE
        }
    }
}
