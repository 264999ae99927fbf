use alloc::vec::Vec;

use super::{dot, sym_eigendecompose, EigenDecomposition, Matrix};
use crate::error::{Error, Result};

/// Relative threshold below which `lambda_min / lambda_max` counts as singular.
pub const SPD_RELATIVE_TOL: f64 = 1e-12;

/// A validated dense symmetric positive definite matrix.
///
/// The eigendecomposition computed for the definiteness check is kept, so
/// spectral quantities are free afterwards.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: Matrix,
    eigen: EigenDecomposition,
}

impl SpdMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        if matrix.rows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite { what: "matrix" });
        }
        let (row, col, difference) = matrix.asymmetry();
        if difference > 1e-12 * matrix.max_abs() {
            return Err(Error::NotSymmetric {
                row,
                col,
                difference,
            });
        }
        for (index, value) in matrix.diagonal().into_iter().enumerate() {
            if value <= 0.0 {
                return Err(Error::NonPositiveDiagonal { index, value });
            }
        }
        let eigen = sym_eigendecompose(&matrix)?;
        let (lo, hi) = (eigen.min_eigenvalue(), eigen.max_eigenvalue());
        if lo <= SPD_RELATIVE_TOL * hi {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: lo,
                max_eigenvalue: hi,
            });
        }
        Ok(Self { matrix, eigen })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(diag))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen.min_eigenvalue()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.max_eigenvalue()
    }

    pub fn condition_number(&self) -> f64 {
        self.lambda_max() / self.lambda_min()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matrix.mul_vec(x)
    }
}

/// Returns `(cos(eta sqrt(A)), sqrt(A) sin(eta sqrt(A)))`.
pub fn matrix_trig(a: &SpdMatrix, eta: f64) -> Result<(Matrix, Matrix)> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
        });
    }
    let e = a.eigen();
    let cos_m = e.function_matrix(|l| libm::cos(eta * libm::sqrt(l)));
    let sin_m = e.function_matrix(|l| {
        let r = libm::sqrt(l);
        r * libm::sin(eta * r)
    });
    Ok((cos_m, sin_m))
}

/// `min 1/2 x^T A x - b^T x`, with the minimizer cached at construction.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    a: SpdMatrix,
    b: Vec<f64>,
    x_star: Vec<f64>,
    f_star: f64,
}

impl QuadraticProblem {
    pub fn new(a: SpdMatrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "right-hand side",
            });
        }
        let e = a.eigen();
        let mut x_star = e.apply_function(|l| 1.0 / l, &b)?;
        // one step of iterative refinement
        let ax = a.mul_vec(&x_star)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        let dx = e.apply_function(|l| 1.0 / l, &r)?;
        for (xi, di) in x_star.iter_mut().zip(&dx) {
            *xi += di;
        }
        let f_star = -0.5 * dot(&b, &x_star);
        Ok(Self {
            a,
            b,
            x_star,
            f_star,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    #[inline]
    pub fn a(&self) -> &SpdMatrix {
        &self.a
    }

    #[inline]
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    #[inline]
    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    /// `f(x_*) = -1/2 b^T x_*`.
    #[inline]
    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        self.a.eigen()
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let ax = self.a.mul_vec(x)?;
        Ok(0.5 * dot(x, &ax) - dot(&self.b, x))
    }

    /// `A x - b`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut r = self.a.mul_vec(x)?;
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        Ok(r)
    }

    /// `f(x) - f(x_*)` computed as `1/2 (x - x_*)^T A (x - x_*)`, which avoids
    /// the cancellation of subtracting two nearly equal function values.
    pub fn f_gap(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let e: Vec<f64> = x.iter().zip(&self.x_star).map(|(a, b)| a - b).collect();
        let ae = self.a.mul_vec(&e)?;
        Ok(0.5 * dot(&e, &ae))
    }

    pub fn dist_to_opt(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(super::dist2(x, &self.x_star))
    }

    /// Coordinate `i` of `A x`.
    #[inline]
    pub(crate) fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        dot(self.a.row(i), x)
    }
}

/// Position and velocity of a Hamiltonian flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl PhaseState {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: v.len(),
            });
        }
        Ok(Self { x, v })
    }

    /// State at rest at `x`.
    pub fn at_rest(x: Vec<f64>) -> Self {
        let v = alloc::vec![0.0; x.len()];
        Self { x, v }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `1/2 ||v||^2`.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * dot(&self.v, &self.v)
    }
}

/// Value and gradient of the quadratic at `x`.
pub fn quadratic_eval(p: &QuadraticProblem, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    p.check_dim(x)?;
    let ax = p.a.mul_vec(x)?;
    let f = 0.5 * dot(x, &ax) - dot(&p.b, x);
    let grad = ax.iter().zip(&p.b).map(|(a, b)| a - b).collect();
    Ok((f, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn spd_validation() {
        assert!(matches!(
            SpdMatrix::from_rows(&[[1.0, 0.5], [0.4, 1.0]]),
            Err(Error::NotSymmetric { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            SpdMatrix::from_rows(&[[1.0, 0.0], [0.0, -1.0]]),
            Err(Error::NonPositiveDiagonal { index: 1, .. })
        ));
        match SpdMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]) {
            Err(Error::NotPositiveDefinite { min_eigenvalue, .. }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        // singular to within the relative tolerance
        assert!(SpdMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).is_err());
        assert!(SpdMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).is_ok());
    }

    #[test]
    fn trig_at_zero_time() {
        let a = SpdMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let (c, s) = matrix_trig(&a, 0.0).unwrap();
        assert!(c.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-14);
        assert!(s.max_abs() < 1e-14);
    }

    #[test]
    fn trig_scalar_and_diagonal() {
        let a = SpdMatrix::from_diagonal(&[4.0]).unwrap();
        let (c, s) = matrix_trig(&a, PI / 6.0).unwrap();
        assert!((c[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((s[(0, 0)] - 1.7320508075688772).abs() < 1e-14);

        let a = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let (c, _) = matrix_trig(&a, PI / 2.0).unwrap();
        assert!(c[(0, 0)].abs() < 1e-15);
        assert!((c[(1, 1)] + 1.0).abs() < 1e-15);
        assert_eq!(c[(0, 1)], 0.0);

        assert!(matrix_trig(&a, -1.0).is_err());
    }

    #[test]
    fn quadratic_eval_examples() {
        let p = QuadraticProblem::new(SpdMatrix::from_diagonal(&[1.0, 1.0]).unwrap(), vec![0.0; 2])
            .unwrap();
        assert_eq!(
            quadratic_eval(&p, &[0.0, 0.0]).unwrap(),
            (0.0, vec![0.0, 0.0])
        );

        let p =
            QuadraticProblem::new(SpdMatrix::from_diagonal(&[4.0]).unwrap(), vec![0.0]).unwrap();
        assert_eq!(quadratic_eval(&p, &[1.0]).unwrap(), (2.0, vec![4.0]));

        let a = SpdMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let p = QuadraticProblem::new(a, vec![1.0, 2.0]).unwrap();
        let (f, g) = quadratic_eval(&p, &[0.2, 0.6]).unwrap();
        assert!((f + 0.7).abs() < 1e-15);
        assert!(g.iter().all(|v| v.abs() < 1e-15));
        assert!((p.x_star()[0] - 0.2).abs() < 1e-15);
        assert!((p.x_star()[1] - 0.6).abs() < 1e-15);
        assert!((p.f_star() + 0.7).abs() < 1e-15);

        assert!(matches!(
            quadratic_eval(&p, &[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn mismatched_rhs() {
        let a = SpdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        assert!(QuadraticProblem::new(a.clone(), vec![1.0]).is_err());
        assert!(QuadraticProblem::new(a, vec![1.0, f64::NAN]).is_err());
        assert!(PhaseState::new(vec![0.0], vec![]).is_err());
    }
}
