//! Test-problem generators and problem fingerprints.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hd_core::{Matrix, QuadraticProblem, SpdMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};
use crate::mm::read_matrix_market;
use crate::vector_io::read_vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `U diag(lambda) U^T` with `lambda` log-spaced in `[1, kappa]` (or given
    /// explicitly) and `U` a seeded random orthogonal matrix.
    SpdSpectrum,
    /// `A = (2/n) Z^T Z + gamma I`, `b = (2/n) Z^T y` for seeded Gaussian data.
    Ridge,
    /// `tridiag(-1, 2, -1)`.
    Poisson1d,
    /// `tridiag(c, 1, c)` with `c` chosen so the condition number is `kappa`.
    TridiagToeplitz,
    /// Matrix Market file.
    File,
}

impl ProblemKind {
    pub const NAMES: [&'static str; 5] = [
        "spd-spectrum",
        "ridge",
        "poisson1d",
        "tridiag-toeplitz",
        "file",
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::SpdSpectrum => "spd-spectrum",
            ProblemKind::Ridge => "ridge",
            ProblemKind::Poisson1d => "poisson1d",
            ProblemKind::TridiagToeplitz => "tridiag-toeplitz",
            ProblemKind::File => "file",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spd-spectrum" => ProblemKind::SpdSpectrum,
            "ridge" => ProblemKind::Ridge,
            "poisson1d" => ProblemKind::Poisson1d,
            "tridiag-toeplitz" => ProblemKind::TridiagToeplitz,
            "file" => ProblemKind::File,
            other => {
                return Err(BenchError::config(format!(
                    "unknown problem kind '{other}' (expected one of {})",
                    ProblemKind::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub dim: usize,
    pub kappa: f64,
    /// Overrides `kappa` for `spd-spectrum`.
    pub spectrum: Option<Vec<f64>>,
    pub seed: u64,
    /// Ridge penalty.
    pub gamma: f64,
    /// Ridge sample count; defaults to `2 dim`.
    pub samples: Option<usize>,
    pub matrix: Option<PathBuf>,
    /// Right-hand side file; replaces the generated `b` for every kind.
    pub rhs: Option<PathBuf>,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            kind: ProblemKind::SpdSpectrum,
            dim: 10,
            kappa: 100.0,
            spectrum: None,
            seed: 0,
            gamma: 1e-3,
            samples: None,
            matrix: None,
            rhs: None,
        }
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kind != ProblemKind::File && self.dim == 0 {
            return Err(BenchError::config("--dim must be positive"));
        }
        match self.kind {
            ProblemKind::SpdSpectrum => match &self.spectrum {
                Some(s) if s.is_empty() || s.iter().any(|&l| !(l > 0.0) || !l.is_finite()) => Err(
                    BenchError::config("spectrum entries must be positive and finite"),
                ),
                Some(_) => Ok(()),
                None => check_kappa(self.kappa),
            },
            ProblemKind::TridiagToeplitz => check_kappa(self.kappa),
            ProblemKind::Ridge if !(self.gamma >= 0.0) || !self.gamma.is_finite() => {
                Err(BenchError::config("--gamma must be nonnegative"))
            }
            ProblemKind::File if self.matrix.is_none() => {
                Err(BenchError::config("kind 'file' needs --matrix"))
            }
            _ => Ok(()),
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(BenchError::config(format!(
            "--kappa must be >= 1, got {kappa}"
        )));
    }
    Ok(())
}

/// Log-spaced values from 1 to `kappa` with exact endpoints.
pub fn log_spaced_spectrum(d: usize, kappa: f64) -> Vec<f64> {
    if d == 1 {
        return vec![1.0];
    }
    (0..d)
        .map(|k| match k {
            0 => 1.0,
            k if k + 1 == d => kappa,
            k => kappa.powf(k as f64 / (d - 1) as f64),
        })
        .collect()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt (applied twice) on
/// Gaussian columns.
pub fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj = hd_core::linalg::dot(c, &v);
                v.iter_mut().zip(c).for_each(|(vi, ci)| *vi -= proj * ci);
            }
        }
        let n = hd_core::linalg::norm2(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let mut u = Matrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for (i, &cij) in c.iter().enumerate() {
            u[(i, j)] = cij;
        }
    }
    u
}

/// `U diag(spectrum) U^T`, built entrywise so the result is exactly symmetric.
pub fn matrix_with_spectrum(spectrum: &[f64], u: &Matrix) -> Matrix {
    let d = spectrum.len();
    let mut a = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = (0..d).map(|k| u[(i, k)] * spectrum[k] * u[(j, k)]).sum();
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

fn tridiagonal(n: usize, diag: f64, off: f64) -> Matrix {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = diag;
        if i + 1 < n {
            a[(i, i + 1)] = off;
            a[(i + 1, i)] = off;
        }
    }
    a
}

/// The ridge objective `(1/n) |Z w - y|^2 + (gamma/2) |w|^2` in quadratic form.
pub fn ridge_problem(z: &Matrix, y: &[f64], gamma: f64) -> Result<QuadraticProblem> {
    let n = z.rows() as f64;
    let mut a = z.transpose().matmul(z)?.scale(2.0 / n);
    for i in 0..a.rows() {
        a[(i, i)] += gamma;
    }
    let b: Vec<f64> = z
        .mul_vec_transposed(y)?
        .into_iter()
        .map(|v| 2.0 * v / n)
        .collect();
    Ok(QuadraticProblem::new(SpdMatrix::new(a)?, b)?)
}

pub fn gen_problem(spec: &ProblemSpec) -> Result<QuadraticProblem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.dim;
    let problem = match spec.kind {
        ProblemKind::SpdSpectrum => {
            let spectrum = spec
                .spectrum
                .clone()
                .unwrap_or_else(|| log_spaced_spectrum(d, spec.kappa));
            let u = random_orthogonal(spectrum.len(), &mut rng);
            let a = SpdMatrix::new(matrix_with_spectrum(&spectrum, &u))?;
            let b = (0..spectrum.len()).map(|_| gaussian(&mut rng)).collect();
            QuadraticProblem::new(a, b)?
        }
        ProblemKind::Ridge => {
            let n = spec.samples.unwrap_or(2 * d);
            if n == 0 {
                return Err(BenchError::config("--samples must be positive"));
            }
            let data = (0..n * d).map(|_| gaussian(&mut rng)).collect();
            let z = Matrix::from_row_major(n, d, data)?;
            let w: Vec<f64> = (0..d).map(|_| gaussian(&mut rng)).collect();
            let y: Vec<f64> = z
                .mul_vec(&w)?
                .into_iter()
                .map(|v| v + 0.1 * gaussian(&mut rng))
                .collect();
            ridge_problem(&z, &y, spec.gamma)?
        }
        ProblemKind::Poisson1d => {
            QuadraticProblem::new(SpdMatrix::new(tridiagonal(d, 2.0, -1.0))?, vec![1.0; d])?
        }
        ProblemKind::TridiagToeplitz => {
            // eigenvalues 1 + 2c cos(k pi / (d + 1)), k = 1..d
            let top = (std::f64::consts::PI / (d as f64 + 1.0)).cos();
            let c = if d == 1 {
                0.0
            } else {
                (spec.kappa - 1.0) / (spec.kappa + 1.0) / (2.0 * top)
            };
            QuadraticProblem::new(SpdMatrix::new(tridiagonal(d, 1.0, c))?, vec![1.0; d])?
        }
        ProblemKind::File => {
            let path = spec.matrix.as_ref().expect("validated");
            let a = read_matrix_market(path)?;
            let n = a.dim();
            QuadraticProblem::new(a, vec![1.0; n])?
        }
    };
    match &spec.rhs {
        Some(path) => {
            let b = read_vector(path)?;
            if b.len() != problem.dim() {
                return Err(BenchError::config(format!(
                    "{}: right-hand side has {} entries, matrix is {}x{}",
                    path.display(),
                    b.len(),
                    problem.dim(),
                    problem.dim()
                )));
            }
            Ok(QuadraticProblem::new(problem.a().clone(), b)?)
        }
        None => Ok(problem),
    }
}

/// SHA-256 over the dimension and the little-endian bytes of `A` and `b`.
pub fn problem_hash(p: &QuadraticProblem) -> String {
    let mut h = Sha256::new();
    h.update((p.dim() as u64).to_le_bytes());
    for v in p.a().matrix().as_slice().iter().chain(p.b()) {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_spectrum_endpoints() {
        let spec = ProblemSpec {
            dim: 2,
            kappa: 4.0,
            seed: 17,
            ..ProblemSpec::default()
        };
        let p = gen_problem(&spec).unwrap();
        let e = &p.a().eigen().eigenvalues;
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 4.0).abs() < 1e-12);
        assert_eq!(problem_hash(&p), problem_hash(&gen_problem(&spec).unwrap()));
        let other = gen_problem(&ProblemSpec { seed: 18, ..spec }).unwrap();
        assert_ne!(problem_hash(&p), problem_hash(&other));
    }

    #[test]
    fn explicit_spectrum() {
        let spec = ProblemSpec {
            spectrum: Some(vec![3.0, 1.0, 2.0]),
            ..ProblemSpec::default()
        };
        let p = gen_problem(&spec).unwrap();
        let e = &p.a().eigen().eigenvalues;
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_spectrum() {
        let spec = ProblemSpec {
            kind: ProblemKind::Poisson1d,
            dim: 3,
            ..ProblemSpec::default()
        };
        let p = gen_problem(&spec).unwrap();
        assert_eq!(p.a().row(1), &[-1.0, 2.0, -1.0]);
        for (k, got) in p.a().eigen().eigenvalues.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 4.0).cos();
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn toeplitz_condition_number() {
        let spec = ProblemSpec {
            kind: ProblemKind::TridiagToeplitz,
            dim: 30,
            kappa: 50.0,
            ..ProblemSpec::default()
        };
        let p = gen_problem(&spec).unwrap();
        assert!((p.a().condition_number() - 50.0).abs() < 1e-8);
    }

    #[test]
    fn ridge_identity_features() {
        let z = Matrix::identity(3);
        let y = [1.0, -2.0, 0.5];
        let p = ridge_problem(&z, &y, 0.0).unwrap();
        assert_eq!(p.a().matrix(), &Matrix::identity(3).scale(2.0 / 3.0));
        // with n = d = 3 the factor is 2/n; x_* = y regardless
        for (x, want) in p.x_star().iter().zip(y) {
            assert!((x - want).abs() < 1e-14);
        }
        let spec = ProblemSpec {
            kind: ProblemKind::Ridge,
            dim: 5,
            ..ProblemSpec::default()
        };
        assert_eq!(gen_problem(&spec).unwrap().dim(), 5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!("cube".parse::<ProblemKind>().is_err());
        let bad = ProblemSpec {
            kappa: 0.5,
            ..ProblemSpec::default()
        };
        assert!(gen_problem(&bad).is_err());
        let file = ProblemSpec {
            kind: ProblemKind::File,
            ..ProblemSpec::default()
        };
        assert!(gen_problem(&file).is_err());
    }
}
