//! Numerical laboratory for non-Hermitian Gaussian random band matrices.
//!
//! The crate is organised by subsystem:
//!
//! * [`specfun`]: Legendre/Hermite recursions and Gauss quadrature.
//! * [`ensemble`]: the band covariance `J = (-W²Δ + 1)⁻¹`, spectral
//!   parameters and reproducible sampling of the complex Gaussian band matrix.
//! * [`correlator`]: log-domain Monte Carlo estimation of the normalised
//!   second correlator of characteristic polynomials.
//! * [`limits`]: the Ginibre, factorised and critical-regime limits; the
//!   latter as `(e^{A₀} 1, 1)` in an orthonormal Legendre basis.
//! * [`transferop`]: spectral checks of the Gaussian transfer kernel and of
//!   the SU(2) averages behind the unitary-sector eigenvalues.
//! * [`blockgate`]: scenario generators and verifiers for the block-matrix
//!   spectral bounds used to truncate the transfer operator.

pub mod blockgate;
pub mod correlator;
pub mod ensemble;
mod error;
pub mod limits;
pub mod linalg;
pub mod rng;
pub mod specfun;
pub mod transferop;

pub use error::{Error, Result};
pub use num_complex::Complex64;
