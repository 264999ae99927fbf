//! Chebyshev polynomial machinery and integration-time schedules.
//!
//! The degree-`K` scaled-and-shifted Chebyshev polynomial on `[m, L]` is
//! `Phi_K(h(lambda)) / Phi_K(h(0))` with `h(lambda) = (L + m - 2 lambda) / (L - m)`.
//! It is the minimax error polynomial for first-order methods, and its roots
//! give Hamiltonian Descent an integration-time schedule that beats it.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `|x|` within this distance of 1 is evaluated on the trigonometric branch.
const UNIT_INTERVAL_SLACK: f64 = 1e-12;
/// Window around `x = 1` where `psi` returns its continuous extension.
const PSI_CONTINUITY_WINDOW: f64 = 1e-9;

/// Bounds `0 < m <= L` on the spectrum of `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBounds {
    m: f64,
    l: f64,
}

impl SpectrumBounds {
    pub fn new(m: f64, l: f64) -> Result<Self> {
        if !(m > 0.0) || !(l >= m) || !l.is_finite() {
            return Err(Error::InvalidBounds { m, l });
        }
        Ok(Self { m, l })
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn l(&self) -> f64 {
        self.l
    }

    #[inline]
    pub fn kappa(&self) -> f64 {
        self.l / self.m
    }

    /// `h(lambda)`, mapping `[m, L]` onto `[-1, 1]` (reversed).
    pub fn interval_map(&self, lambda: f64) -> Result<f64> {
        if self.m == self.l {
            return Err(Error::DegenerateInterval);
        }
        Ok((self.l + self.m - 2.0 * lambda) / (self.l - self.m))
    }
}

/// Roots `r_k = (L+m)/2 - (L-m)/2 cos((k - 1/2) pi / K)`, `k = 1..=K`, ascending.
pub fn chebyshev_roots(bounds: SpectrumBounds, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "K",
            value: 0.0,
        });
    }
    let mid = 0.5 * (bounds.l + bounds.m);
    let half = 0.5 * (bounds.l - bounds.m);
    Ok((1..=k)
        .map(|j| mid - half * libm::cos((j as f64 - 0.5) * PI / k as f64))
        .collect())
}

/// Chebyshev polynomial of the first kind via its closed form:
/// `cos(K arccos x)` on `[-1, 1]`, `cosh(K arccosh x)` for `x > 1` and
/// `(-1)^K cosh(K arccosh(-x))` for `x < -1`.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let kf = k as f64;
    if x.abs() <= 1.0 + UNIT_INTERVAL_SLACK {
        libm::cos(kf * libm::acos(x.clamp(-1.0, 1.0)))
    } else if x > 1.0 {
        libm::cosh(kf * libm::acosh(x))
    } else {
        let mag = libm::cosh(kf * libm::acosh(-x));
        if k.is_multiple_of(2) {
            mag
        } else {
            -mag
        }
    }
}

/// `Phi_K(h(lambda)) / Phi_K(h(0))`, evaluated as a ratio so large `K` does
/// not overflow the hyperbolic cosines.
pub fn scaled_chebyshev(lambda: f64, bounds: SpectrumBounds, k: usize) -> Result<f64> {
    let h = bounds.interval_map(lambda)?;
    let h0 = bounds.interval_map(0.0)?;
    let kf = k as f64;
    // h(0) = (L+m)/(L-m) > 1
    let a0 = libm::acosh(h0);
    let e0 = libm::exp(-2.0 * kf * a0);
    if h.abs() <= 1.0 + UNIT_INTERVAL_SLACK {
        let c = libm::cos(kf * libm::acos(h.clamp(-1.0, 1.0)));
        // 1 / cosh(K a0) = 2 e^{-K a0} / (1 + e^{-2 K a0})
        Ok(c * 2.0 * libm::exp(-kf * a0) / (1.0 + e0))
    } else {
        let a1 = libm::acosh(h.abs());
        let sign = if h < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let e1 = libm::exp(-2.0 * kf * a1);
        Ok(sign * libm::exp(kf * (a1 - a0)) * (1.0 + e1) / (1.0 + e0))
    }
}

/// `max_{lambda in [m, L]} |Phi_K-bar(lambda)| = 2 / (rho^K + rho^-K)` with
/// `rho = (sqrt(kappa) + 1) / (sqrt(kappa) - 1)`.
pub fn worst_case_bound(kappa: f64, k: usize) -> Result<f64> {
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidConditionNumber(kappa));
    }
    let s = libm::sqrt(kappa);
    let q = (s - 1.0) / (s + 1.0);
    let qk = libm::pow(q, k as f64);
    Ok(2.0 * qk / (1.0 + qk * qk))
}

/// A permutation of `0..K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; map.len()];
        for &i in &map {
            if i >= map.len() || seen[i] {
                return Err(Error::InvalidPermutation);
            }
            seen[i] = true;
        }
        Ok(Self(map))
    }

    /// From the one-based notation `sigma(1), ..., sigma(K)`.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        if map.contains(&0) {
            return Err(Error::InvalidPermutation);
        }
        Self::new(map.iter().map(|i| i - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn reversed(k: usize) -> Self {
        Self((0..k).rev().collect())
    }

    /// Seeded Fisher-Yates shuffle.
    pub fn random(k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = rng.random_range(0..=i);
            map.swap(i, j);
        }
        Self(map)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Chebyshev,
    Constant,
    SorEquivalent,
    Custom,
}

/// Integration times, one row per outer iteration.
///
/// Rows have width 1 for Hamiltonian Descent and width `d` for the
/// coordinate methods. Coordinate solvers cycle through the rows, so a
/// single row describes times that are constant in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSchedule {
    kind: ScheduleKind,
    width: usize,
    etas: Vec<f64>,
    sigma: Permutation,
}

impl TimeSchedule {
    /// One scalar time per iteration.
    pub fn scalar(kind: ScheduleKind, etas: Vec<f64>) -> Result<Self> {
        let k = etas.len();
        Self::build(kind, 1, etas, Permutation::identity(k))
    }

    /// The same per-coordinate row for every iteration.
    pub fn constant_row(kind: ScheduleKind, row: Vec<f64>) -> Result<Self> {
        let width = row.len();
        Self::build(kind, width, row, Permutation::identity(1))
    }

    /// One per-coordinate row per iteration.
    pub fn coordinate_rows(kind: ScheduleKind, rows: &[Vec<f64>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let mut etas = Vec::with_capacity(rows.len() * width);
        for r in rows {
            if r.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: r.len(),
                });
            }
            etas.extend_from_slice(r);
        }
        Self::build(kind, width, etas, Permutation::identity(rows.len()))
    }

    fn build(kind: ScheduleKind, width: usize, etas: Vec<f64>, sigma: Permutation) -> Result<Self> {
        if let Some(&bad) = etas.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: bad,
            });
        }
        if width == 0 && !etas.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self {
            kind,
            width,
            etas,
            sigma,
        })
    }

    #[inline]
    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Entries per row.
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.etas.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    /// All times, row-major.
    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    /// Row `k`, cycling when `k >= len()`.
    pub fn row(&self, k: usize) -> &[f64] {
        let r = k % self.len();
        &self.etas[r * self.width..(r + 1) * self.width]
    }

    /// True when every row is identical.
    pub fn is_time_invariant(&self) -> bool {
        let first = &self.etas[..self.width.min(self.etas.len())];
        self.etas.chunks(self.width.max(1)).all(|r| r == first)
    }
}

/// `eta_k = (pi/2) / sqrt(r_{sigma(k)})` over the Chebyshev roots of `[m, L]`.
pub fn hd_schedule(bounds: SpectrumBounds, k: usize, sigma: &Permutation) -> Result<TimeSchedule> {
    if sigma.len() != k {
        return Err(Error::InvalidPermutation);
    }
    let roots = chebyshev_roots(bounds, k)?;
    let etas = (0..k)
        .map(|i| FRAC_PI_2 / libm::sqrt(roots[sigma.apply(i)]))
        .collect();
    let mut s = TimeSchedule::scalar(ScheduleKind::Chebyshev, etas)?;
    s.sigma = sigma.clone();
    Ok(s)
}

/// `psi(x) = cos((pi/2) sqrt(x)) / (1 - x)`, extended by continuity with
/// `psi(1) = pi/4`. Negative input yields NaN.
///
/// Evaluated as `sin((pi/2) u) / (u (1 + sqrt x))` with `u = 1 - sqrt x`,
/// which has no cancellation near `x = 1`.
pub fn psi(x: f64) -> f64 {
    if x < 0.0 {
        return f64::NAN;
    }
    if (x - 1.0).abs() <= PSI_CONTINUITY_WINDOW {
        return FRAC_PI_4;
    }
    let r = libm::sqrt(x);
    let u = (1.0 - x) / (1.0 + r);
    libm::sin(FRAC_PI_2 * u) / (u * (1.0 + r))
}

/// `prod_k cos(eta_k sqrt(lambda))` over every time in the schedule.
pub fn cos_product(lambda: f64, schedule: &TimeSchedule) -> f64 {
    let s = libm::sqrt(lambda);
    schedule.etas().iter().map(|e| libm::cos(e * s)).product()
}

/// Crude bound `psi(x#)^K` on `|cos_product| / |scaled_chebyshev|`.
pub fn speedup_estimate(x_sharp: f64, k: usize) -> f64 {
    libm::pow(psi(x_sharp), k as f64)
}
