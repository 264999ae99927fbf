//! Hamiltonian Descent for strongly convex quadratics.
//!
//! Minimizing `f(x) = x^T A x / 2 - b^T x` (equivalently solving `A x = b`
//! for symmetric positive definite `A`) by repeatedly running the
//! Hamiltonian flow of `f(x) + |v|^2 / 2` from rest and discarding the
//! velocity. On quadratics the flow has a closed form, so every method here
//! is exact up to floating point:
//!
//! - [`hd`]: full-dimensional Hamiltonian Descent, with Chebyshev-root
//!   integration times from [`chebyshev`].
//! - [`chd`]: coordinate-wise flows swept in order (Gauss-Seidel and SOR are
//!   special integration times) and the randomized variant.
//! - [`pchd`]: coordinate flows from a shared snapshot (Jacobi and weighted
//!   Jacobi), with a spectral convergence certificate.
//! - [`general`]: flows for non-quadratic objectives via leapfrog.
//! - [`baselines`]: gradient descent, the Chebyshev method and conjugate gradient.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is how NaN gets rejected alongside nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod baselines;
pub mod chd;
pub mod chebyshev;
pub mod error;
pub mod general;
pub mod hd;
pub mod linalg;
pub mod pchd;
pub mod trace;

pub use error::{Error, Result};
pub use linalg::{Matrix, PhaseState, QuadraticProblem, SpdMatrix};
pub use trace::{ConvergenceTrace, RunOptions, RunOutcome, TraceRow};
