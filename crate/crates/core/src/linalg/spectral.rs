use super::{sym_eigendecompose, Matrix};
use crate::error::{Error, Result};

const MAX_SQUARINGS: usize = 64;

/// Spectral radius `max |lambda_i(M)|` of a square matrix.
///
/// Symmetric input goes through the Jacobi eigensolver. Anything else uses
/// normalized repeated squaring, `rho = lim ||M^(2^j)||^(1/2^j)`, tracking the
/// scale in log space. Unlike plain power iteration this does not care about
/// complex or equal-modulus dominant eigenvalues, and the norm-equivalence
/// constant fades as `C^(2^-j)`.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if m.rows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !m.is_finite() {
        return Err(Error::NonFinite { what: "matrix" });
    }
    let (_, _, asym) = m.asymmetry();
    if asym <= 1e-14 * m.max_abs() {
        let e = sym_eigendecompose(m)?;
        return Ok(e.min_eigenvalue().abs().max(e.max_eigenvalue().abs()));
    }
    radius_by_squaring(m)
}

fn radius_by_squaring(m: &Matrix) -> Result<f64> {
    let norm = m.norm_inf();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut b = m.scale(1.0 / norm);
    // ||M^(2^j)|| = exp(log_scale) * ||B_j||, with ||B_j|| = 1
    let mut log_scale = libm::log(norm);
    let mut power = 1.0_f64;
    let mut estimate = norm;
    for _ in 0..MAX_SQUARINGS {
        let sq = b.matmul(&b)?;
        let n = sq.norm_inf();
        if n == 0.0 || !n.is_finite() {
            // nilpotent part exhausted the matrix
            return Ok(if n == 0.0 { 0.0 } else { estimate });
        }
        log_scale = 2.0 * log_scale + libm::log(n);
        power *= 2.0;
        b = sq.scale(1.0 / n);
        let next = libm::exp(log_scale / power);
        if (next - estimate).abs() <= 1e-15 * next.max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::SpectralRadiusNoConvergence {
        iterations: MAX_SQUARINGS,
        estimate,
    })
}
