//! Dense symmetric linear algebra shared by every solver.

mod eigen;
mod matrix;
mod problem;
mod spectral;

pub use eigen::{sym_eigendecompose, EigenDecomposition};
pub use matrix::Matrix;
pub use problem::{
    matrix_trig, quadratic_eval, PhaseState, QuadraticProblem, SpdMatrix, SPD_RELATIVE_TOL,
};
pub use spectral::spectral_radius;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Euclidean distance `||a - b||_2`.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}
