use core::fmt;

/// Errors produced by the solvers and their supporting linear algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    IndexOutOfRange {
        index: usize,
        dim: usize,
    },
    EmptyMatrix,
    NonFinite {
        what: &'static str,
    },
    NotSymmetric {
        row: usize,
        col: usize,
        difference: f64,
    },
    NonPositiveDiagonal {
        index: usize,
        value: f64,
    },
    NotPositiveDefinite {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },
    EigenNoConvergence {
        sweeps: usize,
        off_diagonal_norm: f64,
    },
    SpectralRadiusNoConvergence {
        iterations: usize,
        estimate: f64,
    },
    InvalidBounds {
        m: f64,
        l: f64,
    },
    /// `m == L`, the Chebyshev interval map is undefined.
    DegenerateInterval,
    InvalidConditionNumber(f64),
    InvalidPermutation,
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// The integration time makes `sin(eta * sqrt(A_ii))` vanish, so the coordinate never moves.
    InadmissibleTime {
        coordinate: usize,
        eta: f64,
    },
    InvalidProbabilities,
    TimeVaryingSchedule,
    IntegratorNonFinite {
        step: usize,
    },
    MissingSmoothness,
    CgBreakdown {
        iteration: usize,
        curvature: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            Error::EmptyMatrix => f.write_str("matrix has zero dimension"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::NotSymmetric {
                row,
                col,
                difference,
            } => write!(
                f,
                "matrix is not symmetric: |A[{row},{col}] - A[{col},{row}]| = {difference:e}"
            ),
            Error::NonPositiveDiagonal { index, value } => {
                write!(
                    f,
                    "diagonal entry A[{index},{index}] = {value} is not positive"
                )
            }
            Error::NotPositiveDefinite {
                min_eigenvalue,
                max_eigenvalue,
            } => write!(
                f,
                "matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e} \
                 (largest {max_eigenvalue:e})"
            ),
            Error::EigenNoConvergence {
                sweeps,
                off_diagonal_norm,
            } => write!(
                f,
                "Jacobi eigensolver did not converge after {sweeps} sweeps \
                 (off-diagonal norm {off_diagonal_norm:e})"
            ),
            Error::SpectralRadiusNoConvergence {
                iterations,
                estimate,
            } => write!(
                f,
                "spectral radius did not converge after {iterations} iterations \
                 (last estimate {estimate})"
            ),
            Error::InvalidBounds { m, l } => {
                write!(
                    f,
                    "invalid spectrum bounds: need 0 < m <= L, got m={m}, L={l}"
                )
            }
            Error::DegenerateInterval => f.write_str("spectrum interval has zero width (m == L)"),
            Error::InvalidConditionNumber(kappa) => {
                write!(f, "condition number must exceed 1, got {kappa}")
            }
            Error::InvalidPermutation => f.write_str("sigma is not a permutation"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter `{name}`")
            }
            Error::InadmissibleTime { coordinate, eta } => write!(
                f,
                "integration time {eta} for coordinate {coordinate} is a zero of \
                 sin(eta * sqrt(A_ii)); the coordinate would never move"
            ),
            Error::InvalidProbabilities => {
                f.write_str("coordinate probabilities must be positive, finite, and sum to 1")
            }
            Error::TimeVaryingSchedule => f.write_str(
                "the convergence certificate only covers integration times constant in k",
            ),
            Error::IntegratorNonFinite { step } => {
                write!(f, "leapfrog produced a non-finite state at step {step}")
            }
            Error::MissingSmoothness => {
                f.write_str("objective does not declare a smoothness constant L")
            }
            Error::CgBreakdown {
                iteration,
                curvature,
            } => write!(
                f,
                "conjugate gradient breakdown at iteration {iteration}: p^T A p = {curvature:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
