#![allow(dead_code)]

use hd_core::linalg::{Matrix, QuadraticProblem, SpdMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Orthogonal matrix from modified Gram-Schmidt on a uniform random matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj: f64 = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|a| a / n).collect());
        }
    }
    let mut u = Matrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..d {
            u[(i, j)] = c[i];
        }
    }
    u
}

/// `U diag(spectrum) U^T`, symmetrized exactly.
pub fn with_spectrum(rng: &mut ChaCha8Rng, spectrum: &[f64]) -> SpdMatrix {
    let d = spectrum.len();
    let u = random_orthogonal(rng, d);
    let mut a = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v: f64 = (0..d).map(|k| u[(i, k)] * spectrum[k] * u[(j, k)]).sum();
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    SpdMatrix::new(a).expect("generated matrix is SPD")
}

/// Log-spaced spectrum in `[1, kappa]` with exact endpoints.
pub fn log_spectrum(d: usize, kappa: f64) -> Vec<f64> {
    if d == 1 {
        return vec![1.0];
    }
    (0..d)
        .map(|k| kappa.powf(k as f64 / (d - 1) as f64))
        .collect()
}

pub fn random_spd(rng: &mut ChaCha8Rng, d: usize, kappa: f64) -> SpdMatrix {
    with_spectrum(rng, &log_spectrum(d, kappa))
}

pub fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_problem(seed: u64, d: usize, kappa: f64) -> QuadraticProblem {
    let mut r = rng(seed);
    let a = random_spd(&mut r, d, kappa);
    let b = random_vec(&mut r, d);
    QuadraticProblem::new(a, b).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `U diag(g(lambda)) U^T v` with the problem's own decomposition.
pub fn spectral_apply(p: &QuadraticProblem, g: impl Fn(f64) -> f64, v: &[f64]) -> Vec<f64> {
    p.eigen().apply_function(g, v).unwrap()
}
