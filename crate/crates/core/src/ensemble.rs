//! The complex Gaussian band ensemble.
//!
//! Entries `H_jk` are independent circular complex Gaussians with
//! `E|H_jk|^2 = J_jk`, where `J = (-W^2 Δ + 1)^{-1}` and `Δ` is the discrete
//! Laplacian on `1..=N` with reflecting (Neumann) ends.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{thomas_solve, Tridiagonal};
use crate::rng::Substream;

/// Matrix size `N` and bandwidth `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandProfile {
    n: usize,
    w: f64,
}

impl BandProfile {
    pub fn new(n: usize, w: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("band profile: N must be at least 1"));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(domain(format!("band profile: W = {w} must be positive and finite")));
        }
        Ok(Self { n, w })
    }

    /// Profile with `W = round(kappa * sqrt(N))`, the critical scaling.
    pub fn from_kappa(n: usize, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(domain(format!("band profile: kappa = {kappa} must be positive")));
        }
        let w = (kappa * (n as f64).sqrt()).round().max(1.0);
        Self::new(n, w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// `κ = W / √N`.
    pub fn kappa(&self) -> f64 {
        self.w / (self.n as f64).sqrt()
    }
}

/// Neumann discrete Laplacian on `n` sites.
pub fn neumann_laplacian(n: usize) -> Result<Tridiagonal> {
    if n == 0 {
        return Err(domain("neumann_laplacian: n must be at least 1"));
    }
    let mut diag = vec![-2.0; n];
    diag[0] = -1.0;
    diag[n - 1] = -1.0;
    if n == 1 {
        diag[0] = 0.0;
    }
    Ok(Tridiagonal { lower: vec![1.0; n - 1], diag, upper: vec![1.0; n - 1] })
}

/// Dense variance profile `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max_j |Σ_k J_jk - 1|`.
    pub fn row_sum_defect(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `c` with `J_jk <= J_jj exp(-c |j-k| / W)` for all pairs.
    ///
    /// Returns `+inf` for `N = 1`.
    pub fn decay_constant(&self, w: f64) -> f64 {
        let n = self.dim();
        let mut c = f64::INFINITY;
        for k in 0..n {
            for j in 0..n {
                if j == k {
                    continue;
                }
                let d = (j as f64 - k as f64).abs();
                let r = (self.entries[(j, j)] / self.entries[(j, k)]).ln() * w / d;
                c = c.min(r);
            }
        }
        c
    }

    /// Row-major CSV with 17 significant digits per entry.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in self.entries.row_iter() {
            let mut first = true;
            for v in r.iter() {
                if !first {
                    s.push(',');
                }
                first = false;
                let _ = write!(s, "{v:.16e}");
            }
            s.push('\n');
        }
        s
    }
}

/// `J = (-W^2 Δ + 1)^{-1}` by one Thomas solve per column.
///
/// Only the lower triangle of each solve is kept and mirrored, so `J` is
/// exactly symmetric.
pub fn covariance(profile: &BandProfile) -> CovarianceMatrix {
    let n = profile.n;
    let w2 = profile.w * profile.w;
    let lap = neumann_laplacian(n).expect("profile guarantees n >= 1");
    let a = Tridiagonal {
        lower: lap.lower.iter().map(|x| -w2 * x).collect(),
        diag: lap.diag.iter().map(|x| 1.0 - w2 * x).collect(),
        upper: lap.upper.iter().map(|x| -w2 * x).collect(),
    };
    let mut j = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e[col] = 1.0;
        let x = thomas_solve(&a, &e).expect("-W^2 Δ + 1 is strictly diagonally dominant");
        e[col] = 0.0;
        for row in col..n {
            j[(row, col)] = x[row];
            j[(col, row)] = x[row];
        }
    }
    CovarianceMatrix { entries: j }
}

/// Scalars attached to the spectral centre `z` and bandwidth `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub z: Complex64,
    pub w: f64,
    /// `(1 - |z|^2)^{1/2}`
    pub u_star: f64,
    /// `u_* (2 + u_*^2 / W^2)^{1/2}`
    pub alpha: f64,
    /// `1 - (α - u_*^2 / W) / W`
    pub lambda_star: f64,
}

impl SpectralParams {
    /// `κ_* u_*` for matrix size `n`, the only combination entering the
    /// critical limit.
    pub fn kappa_u(&self, n: usize) -> f64 {
        self.w / (n as f64).sqrt() * self.u_star
    }
}

pub fn spectral_params(z: Complex64, w: f64) -> Result<SpectralParams> {
    let r2 = z.norm_sqr();
    if !(r2 < 1.0) {
        return Err(domain(format!("spectral_params: |z| = {} must be below 1", r2.sqrt())));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(domain(format!("spectral_params: W = {w} must be positive")));
    }
    Ok(params_from_u2(z, 1.0 - r2, w))
}

impl SpectralParams {
    /// Parameters for a given `u_*` in `(0, 1]`, with `z = (1 - u_*^2)^{1/2}` real.
    pub fn from_u_star(u_star: f64, w: f64) -> Result<Self> {
        if !(u_star > 0.0 && u_star <= 1.0) {
            return Err(domain(format!("spectral params: u_* = {u_star} must lie in (0, 1]")));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(domain(format!("spectral params: W = {w} must be positive")));
        }
        let u2 = u_star * u_star;
        let z = Complex64::new((1.0 - u2).max(0.0).sqrt(), 0.0);
        let mut p = params_from_u2(z, u2, w);
        p.u_star = u_star;
        Ok(p)
    }
}

fn params_from_u2(z: Complex64, u2: f64, w: f64) -> SpectralParams {
    let u_star = u2.sqrt();
    let alpha = u_star * (2.0 + u2 / (w * w)).sqrt();
    let lambda_star = 1.0 - (alpha - u2 / w) / w;
    SpectralParams { z, w, u_star, alpha, lambda_star }
}

/// Standard deviations `sqrt(J_jk / 2)` of the real and imaginary parts.
#[derive(Debug, Clone)]
pub struct Sampler {
    sd: DMatrix<f64>,
}

impl Sampler {
    pub fn new(j: &CovarianceMatrix) -> Self {
        Self { sd: j.entries.map(|v| (0.5 * v).sqrt()) }
    }

    pub fn dim(&self) -> usize {
        self.sd.nrows()
    }

    /// Sample `index` of the run keyed by `seed`.
    ///
    /// Entries are filled row by row, one Box–Muller pair per entry.
    pub fn sample_one(&self, seed: u64, index: u64) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut rng = Substream::new(seed, index);
        let mut h = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let (x, y) = rng.normal_pair();
                let s = self.sd[(r, c)];
                h[(r, c)] = Complex64::new(s * x, s * y);
            }
        }
        h
    }
}

/// Batch of samples together with the keys that regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub matrices: Vec<DMatrix<Complex64>>,
    pub seed: u64,
    pub indices: Vec<u64>,
}

pub fn sample_one(j: &CovarianceMatrix, seed: u64, index: u64) -> DMatrix<Complex64> {
    Sampler::new(j).sample_one(seed, index)
}

/// Samples `0..count` of the run keyed by `seed`, generated in parallel.
pub fn sample(j: &CovarianceMatrix, seed: u64, count: usize) -> Result<SampleBatch> {
    if count == 0 {
        return Err(domain("sample: count must be at least 1"));
    }
    let sampler = Sampler::new(j);
    let indices: Vec<u64> = (0..count as u64).collect();
    let matrices = indices.par_iter().map(|&i| sampler.sample_one(seed, i)).collect();
    Ok(SampleBatch { matrices, seed, indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laplacian_examples() {
        assert_eq!(neumann_laplacian(1).unwrap().to_dense(), DMatrix::from_element(1, 1, 0.0));
        assert_eq!(
            neumann_laplacian(2).unwrap().to_dense(),
            DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0])
        );
        assert_eq!(
            neumann_laplacian(3).unwrap().to_dense(),
            DMatrix::from_row_slice(3, 3, &[-1.0, 1.0, 0.0, 1.0, -2.0, 1.0, 0.0, 1.0, -1.0])
        );
        assert!(neumann_laplacian(0).is_err());
    }

    #[test]
    fn covariance_examples() {
        let j1 = covariance(&BandProfile::new(1, 3.7).unwrap());
        assert_eq!(j1.entries[(0, 0)], 1.0);
        let j2 = covariance(&BandProfile::new(2, 1.0).unwrap());
        assert_relative_eq!(j2.entries[(0, 0)], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(j2.entries[(0, 1)], 1.0 / 3.0, epsilon = 1e-15);
        let j50 = covariance(&BandProfile::new(50, 5.0).unwrap());
        assert!(j50.row_sum_defect() <= 1e-12);
        assert!(j50.decay_constant(5.0) > 0.0);
    }

    #[test]
    fn spectral_param_examples() {
        let p = spectral_params(Complex64::new(0.0, 0.0), 10.0).unwrap();
        assert_relative_eq!(p.alpha, 2.01f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(p.alpha, 1.4177447, epsilon = 1e-7);
        assert_relative_eq!(p.lambda_star, 0.8682255, epsilon = 1e-7);
        let q = spectral_params(Complex64::new(0.6, 0.0), 20.0).unwrap();
        assert_relative_eq!(q.u_star, 0.8, epsilon = 1e-15);
        assert!(spectral_params(Complex64::new(0.6, 0.8), 20.0).is_err());
    }

    #[test]
    fn kappa_profile() {
        let p = BandProfile::from_kappa(128, 1.0).unwrap();
        assert_eq!(p.w(), 11.0);
        assert_eq!(p.kappa(), 11.0 / 128f64.sqrt());
    }
}
