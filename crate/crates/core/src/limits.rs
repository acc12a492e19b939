//! Limits of the correlator ratio in the three bandwidth regimes.
//!
//! The critical limit is `(e^{A0} 1, 1)` for the Legendre-type operator
//!
//! ```text
//! A0 = (1 / 8κ²u²) d/dz (1 - z²) d/dz + (multiplication term)
//! ```
//!
//! on `[-1, 1]`, evaluated in the orthonormal Legendre basis of the
//! normalised measure `dz/2`, where the constant function is the first basis
//! vector.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::linalg::{expm_pade, expm_symmetric, expm_symmetric_00};

/// Below this `|ζ|^2` the Ginibre limit is evaluated by its Taylor series.
pub const GINIBRE_SERIES_THRESHOLD: f64 = 1e-6;

/// Default Legendre truncation order.
pub const DEFAULT_TRUNCATION: usize = 60;

/// Smallest accepted truncation order.
pub const MIN_TRUNCATION: usize = 8;

/// `(1 - e^{-4|ζ|²}) / (4|ζ|²)`, the Ginibre (wide-band) limit.
pub fn ginibre_limit(zeta: Complex64) -> f64 {
    let x = 4.0 * zeta.norm_sqr();
    if x < 4.0 * GINIBRE_SERIES_THRESHOLD {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `e^{-2|ζ|²}`, the factorised (narrow-band) limit.
pub fn factorized_limit(zeta: Complex64) -> f64 {
    (-2.0 * zeta.norm_sqr()).exp()
}

/// How the multiplication term of `A0` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum A0Mode {
    /// `+ 2z`, exactly as the theorem displays it.
    Literal,
    /// `+ 2|ζ|²(z - 1)`, which degenerates to both wide- and narrow-band limits.
    #[default]
    RegimeConsistent,
}

impl A0Mode {
    pub const ALL: [A0Mode; 2] = [A0Mode::RegimeConsistent, A0Mode::Literal];
}

impl fmt::Display for A0Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            A0Mode::Literal => f.write_str("literal"),
            A0Mode::RegimeConsistent => f.write_str("regime-consistent"),
        }
    }
}

impl FromStr for A0Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(A0Mode::Literal),
            "regime-consistent" => Ok(A0Mode::RegimeConsistent),
            other => Err(config(format!("unknown A0 mode '{other}'"))),
        }
    }
}

/// Truncated matrix of `A0` on Legendre degrees `0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct A0Matrix {
    pub entries: DMatrix<f64>,
    pub kappa_u: f64,
    pub zeta_abs2: f64,
    pub mode: A0Mode,
}

impl A0Matrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

/// `(z p̂_ℓ, p̂_{ℓ+1})` for the orthonormal Legendre basis under `dz/2`.
pub fn legendre_multiplication_offdiag(ell: usize) -> f64 {
    let l = ell as f64;
    (l + 1.0) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)).sqrt()
}

pub fn a0_matrix(kappa_u: f64, zeta: Complex64, m: usize, mode: A0Mode) -> Result<A0Matrix> {
    if !(kappa_u > 0.0 && kappa_u.is_finite()) {
        return Err(domain(format!("a0_matrix: kappa_u = {kappa_u} must be positive")));
    }
    if m < MIN_TRUNCATION {
        return Err(config(format!("a0_matrix: truncation {m} below the minimum {MIN_TRUNCATION}")));
    }
    let size = m + 1;
    let zeta_abs2 = zeta.norm_sqr();
    let (t_scale, shift) = match mode {
        A0Mode::Literal => (2.0, 0.0),
        A0Mode::RegimeConsistent => (2.0 * zeta_abs2, -2.0 * zeta_abs2),
    };
    let lap = 1.0 / (8.0 * kappa_u * kappa_u);
    let mut a = DMatrix::zeros(size, size);
    for l in 0..size {
        let lf = l as f64;
        a[(l, l)] = -lf * (lf + 1.0) * lap + shift;
        if l + 1 < size {
            let t = t_scale * legendre_multiplication_offdiag(l);
            a[(l, l + 1)] = t;
            a[(l + 1, l)] = t;
        }
    }
    Ok(A0Matrix { entries: a, kappa_u, zeta_abs2, mode })
}

/// `(e^{A0} 1, 1)`, the `(0, 0)` entry of the exponential of the truncated matrix.
pub fn critical_limit(kappa_u: f64, zeta: Complex64, m: usize, mode: A0Mode) -> Result<f64> {
    let a = a0_matrix(kappa_u, zeta, m, mode)?;
    expm_symmetric_00(&a.entries)
}

/// `e^A` for symmetric `A` by eigendecomposition.
pub fn matrix_exponential(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    expm_symmetric(a)
}

/// Relative disagreement in the `(0, 0)` entry between the eigendecomposition
/// and scaling-and-squaring evaluations of `e^A`.
pub fn matrix_exponential_cross_check(a: &DMatrix<f64>) -> Result<f64> {
    let e = expm_symmetric(a)?[(0, 0)];
    let p = expm_pade(a)?[(0, 0)];
    Ok((e - p).abs() / e.abs().max(f64::MIN_POSITIVE))
}
