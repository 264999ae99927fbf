//! Symmetric eigendecomposition by cyclic Jacobi rotations, and matrix
//! functions built on top of it.

use alloc::vec::Vec;

use super::Matrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// `A = U diag(eigenvalues) U^T` with eigenvalues sorted ascending and the
/// columns of `U` aligned with them.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `U^T x`.
    pub fn to_eigenbasis(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eigenvectors.mul_vec_transposed(x)
    }

    /// `U c`.
    pub fn from_eigenbasis(&self, c: &[f64]) -> Result<Vec<f64>> {
        self.eigenvectors.mul_vec(c)
    }

    /// `U diag(g(lambda_j)) U^T x` without forming the matrix.
    pub fn apply_function<F: Fn(f64) -> f64>(&self, g: F, x: &[f64]) -> Result<Vec<f64>> {
        let mut c = self.to_eigenbasis(x)?;
        for (cj, &lam) in c.iter_mut().zip(&self.eigenvalues) {
            *cj *= g(lam);
        }
        self.from_eigenbasis(&c)
    }

    /// `U diag(g(lambda_j)) U^T` as a dense matrix.
    pub fn function_matrix<F: Fn(f64) -> f64>(&self, g: F) -> Matrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let gl: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += u[(i, k)] * gl[k] * u[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.function_matrix(|l| l)
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Sweeps over all `(p, q)` pairs, annihilating each off-diagonal entry with a
/// plane rotation, until the off-diagonal Frobenius norm drops below
/// `1e-13 * ||A||_F`. Only the upper triangle's symmetry is assumed; the
/// caller is responsible for passing a symmetric matrix.
pub fn sym_eigendecompose(a: &Matrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !a.is_finite() {
        return Err(Error::NonFinite { what: "matrix" });
    }

    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.norm_frobenius();
    let target = OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&w);
        if off > target {
            return Err(Error::EigenNoConvergence {
                sweeps: MAX_SWEEPS,
                off_diagonal_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].total_cmp(&w[(j, j)]));
    let eigenvalues = order.iter().map(|&i| w[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(w: &Matrix) -> f64 {
    let n = w.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += w[(i, j)] * w[(i, j)];
            }
        }
    }
    libm::sqrt(s)
}

/// One Jacobi rotation zeroing `w[p,q]`; accumulates `v <- v J`.
fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = w[(p, p)];
    let aqq = w[(q, q)];
    // Entries below rounding level relative to both diagonals are flushed.
    if apq.abs() <= f64::EPSILON * 0.5 * app.abs().min(aqq.abs()) {
        w[(p, q)] = 0.0;
        w[(q, p)] = 0.0;
        return;
    }
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_finite() {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    } else {
        0.5 / theta
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let n = w.rows();

    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = c * wkp - s * wkq;
        w[(k, q)] = s * wkp + c * wkq;
    }
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = c * wpk - s * wqk;
        w[(q, k)] = s * wpk + c * wqk;
    }
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eigendecompose(&Matrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, [1.0, 1.0, 1.0]);
        assert_eq!(e.eigenvectors, Matrix::identity(3));

        let e = sym_eigendecompose(&Matrix::from_diagonal(&[5.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, [2.0, 5.0]);
        // sorted: column 0 is e_2, column 1 is e_1
        assert_eq!(e.eigenvectors[(1, 0)].abs(), 1.0);
        assert_eq!(e.eigenvectors[(0, 1)].abs(), 1.0);
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        // det([[2-l,1],[1,2-l]]) = (2-l)^2 - 1 -> l in {1, 3}
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = sym_eigendecompose(&a).unwrap();
        assert!(close(e.eigenvalues[0], 1.0, 1e-14));
        assert!(close(e.eigenvalues[1], 3.0, 1e-14));
        let h = core::f64::consts::FRAC_1_SQRT_2;
        // eigenvectors are determined up to sign
        let u = &e.eigenvectors;
        assert!(close((u[(0, 0)] * u[(1, 0)]).abs(), 0.5, 1e-14));
        assert!(close(u[(0, 0)] + u[(1, 0)], 0.0, 1e-14));
        assert!(close(u[(0, 1)].abs(), h, 1e-14));
        assert!(close(u[(0, 1)] - u[(1, 1)], 0.0, 1e-14));
    }

    #[test]
    fn function_matrix_matches_apply() {
        let a = Matrix::from_rows(&[[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]]).unwrap();
        let e = sym_eigendecompose(&a).unwrap();
        let x = [0.3, -1.0, 2.0];
        let sq = e.function_matrix(|l| l * l);
        let direct = a.matmul(&a).unwrap();
        assert!(sq.sub(&direct).unwrap().max_abs() < 1e-12);
        let y = e.apply_function(|l| l * l, &x).unwrap();
        let z = direct.mul_vec(&x).unwrap();
        for (p, q) in y.iter().zip(&z) {
            assert!(close(*p, *q, 1e-12));
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            sym_eigendecompose(&Matrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            sym_eigendecompose(&Matrix::zeros(0, 0)),
            Err(Error::EmptyMatrix)
        );
        let mut nan = Matrix::identity(2);
        nan[(0, 1)] = f64::NAN;
        assert!(matches!(
            sym_eigendecompose(&nan),
            Err(Error::NonFinite { .. })
        ));
    }
}
