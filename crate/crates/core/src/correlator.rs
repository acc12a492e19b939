//! Monte Carlo estimation of the normalised correlator ratio
//!
//! ```text
//! Θ(z1, z2) / (Θ(z1, z1) Θ(z2, z2))^{1/2},   Θ(z1, z2) = E |det(H - z1)|^2 |det(H - z2)|^2
//! ```
//!
//! with `z1,2 = z ± ζ/√N`. Numerator and both denominators are estimated from
//! the same samples and every mean is accumulated in the log domain.

use std::collections::BTreeMap;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{covariance, BandProfile, Sampler};
use crate::error::{domain, Error, Result};
use crate::linalg::log_absdet_sq_shifted;

/// Centre `z` and offset `ζ` for matrix size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetSpec {
    pub z: Complex64,
    pub zeta: Complex64,
    pub n: usize,
}

impl OffsetSpec {
    pub fn new(z: Complex64, zeta: Complex64, n: usize) -> Result<Self> {
        if !(z.norm_sqr() < 1.0) {
            return Err(domain(format!("offset: |z| = {} must be below 1", z.norm())));
        }
        if n == 0 {
            return Err(domain("offset: N must be at least 1"));
        }
        Ok(Self { z, zeta, n })
    }

    fn shift(&self) -> Complex64 {
        self.zeta / (self.n as f64).sqrt()
    }

    /// `z + ζ/√N`
    pub fn z1(&self) -> Complex64 {
        self.z + self.shift()
    }

    /// `z - ζ/√N`
    pub fn z2(&self) -> Complex64 {
        self.z - self.shift()
    }
}

/// Log-domain estimate of the correlator ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    /// log of the empirical mean of `|det(H-z1)|^2 |det(H-z2)|^2`
    pub log_theta12: f64,
    pub log_theta11: f64,
    pub log_theta22: f64,
    pub ratio: f64,
    /// jackknife standard error of `ln ratio`
    pub stderr_log: f64,
    pub n_samples: usize,
    /// samples dropped because `H - z` was exactly singular
    pub n_excluded: usize,
}

/// `ln |det(H - z I)|^2`; `-inf` if `H - z I` is exactly singular.
pub fn log_absdet_sq(h: &DMatrix<Complex64>, z: Complex64) -> f64 {
    log_absdet_sq_shifted(h, z)
}

/// Pairwise sum in index order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `ln Σ e^{x_i}`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let shifted: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    m + pairwise_sum(&shifted).ln()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Leave-one-out values `ln Σ_{j≠i} e^{x_j}` via prefix and suffix sums.
fn log_sum_exp_loo(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut prefix = vec![f64::NEG_INFINITY; n + 1];
    for i in 0..n {
        prefix[i + 1] = log_add(prefix[i], xs[i]);
    }
    let mut suffix = vec![f64::NEG_INFINITY; n + 1];
    for i in (0..n).rev() {
        suffix[i] = log_add(suffix[i + 1], xs[i]);
    }
    (0..n).map(|i| log_add(prefix[i], suffix[i + 1])).collect()
}

/// Assembles the ratio from per-sample `l1_i = ln|det(H_i - z1)|^2` and
/// `l2_i = ln|det(H_i - z2)|^2`.
///
/// Samples with a non-finite entry are excluded with a warning.
pub fn ratio_from_logdets(l1: &[f64], l2: &[f64]) -> Result<RatioEstimate> {
    assert_eq!(l1.len(), l2.len());
    let mut a = Vec::with_capacity(l1.len());
    let mut b = Vec::with_capacity(l1.len());
    let mut y = Vec::with_capacity(l1.len());
    let mut excluded = 0;
    for (&x1, &x2) in l1.iter().zip(l2) {
        if !(x1.is_finite() && x2.is_finite()) {
            excluded += 1;
            continue;
        }
        a.push(2.0 * x1);
        b.push(2.0 * x2);
        y.push(x1 + x2);
    }
    if excluded > 0 {
        warn!("{excluded} singular sample(s) excluded from the ratio estimate");
    }
    let n = y.len();
    if n < 2 {
        return Err(Error::Estimation(format!(
            "only {n} usable sample(s) out of {}; at least 2 are required",
            l1.len()
        )));
    }
    let ln_n = (n as f64).ln();
    let (sa, sb, sy) = (log_sum_exp(&a), log_sum_exp(&b), log_sum_exp(&y));
    let log_theta11 = sa - ln_n;
    let log_theta22 = sb - ln_n;
    let log_theta12 = sy - ln_n;
    let log_ratio = log_theta12 - (log_theta11 + log_theta22) / 2.0;

    let (la, lb, ly) = (log_sum_exp_loo(&a), log_sum_exp_loo(&b), log_sum_exp_loo(&y));
    let loo: Vec<f64> = (0..n).map(|i| ly[i] - (la[i] + lb[i]) / 2.0).collect();
    let mean = pairwise_sum(&loo) / n as f64;
    let dev: Vec<f64> = loo.iter().map(|v| (v - mean).powi(2)).collect();
    let stderr_log = ((n as f64 - 1.0) / n as f64 * pairwise_sum(&dev)).sqrt();

    Ok(RatioEstimate {
        log_theta12,
        log_theta11,
        log_theta22,
        ratio: log_ratio.exp(),
        stderr_log,
        n_samples: n,
        n_excluded: excluded,
    })
}

/// Per-sample `ln|det(H_i - s)|^2` for every shift `s`, samples `0..n_samples`.
///
/// Rows are in sample order whatever the thread count.
pub fn log_det_table(
    profile: &BandProfile,
    shifts: &[Complex64],
    n_samples: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let sampler = Sampler::new(&covariance(profile));
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let h = sampler.sample_one(seed, i);
            shifts.iter().map(|&s| log_absdet_sq(&h, s)).collect()
        })
        .collect()
}

pub fn theta_ratio(
    profile: &BandProfile,
    offsets: &OffsetSpec,
    n_samples: usize,
    seed: u64,
) -> Result<RatioEstimate> {
    if offsets.n != profile.n() {
        return Err(domain(format!(
            "theta_ratio: offset built for N = {} but profile has N = {}",
            offsets.n,
            profile.n()
        )));
    }
    let curve = ratio_curve(profile, offsets.z, &[offsets.zeta], n_samples, seed)?;
    Ok(curve[0].1)
}

fn key(c: Complex64) -> (u64, u64) {
    (c.re.to_bits(), c.im.to_bits())
}

/// One estimate per `ζ`, all from the same samples.
///
/// Each distinct shift `z ± ζ/√N` is factorised once per sample, so `ζ` and
/// `-ζ` see identical log-determinants with the roles of `z1` and `z2` swapped.
pub fn ratio_curve(
    profile: &BandProfile,
    z: Complex64,
    zeta_grid: &[Complex64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(Complex64, RatioEstimate)>> {
    if zeta_grid.is_empty() {
        return Err(domain("ratio_curve: zeta grid is empty"));
    }
    if n_samples < 2 {
        return Err(domain("ratio_curve: at least 2 samples are required"));
    }
    let offsets = zeta_grid
        .iter()
        .map(|&zeta| OffsetSpec::new(z, zeta, profile.n()))
        .collect::<Result<Vec<_>>>()?;
    let mut slot: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    let mut shifts = Vec::new();
    for o in &offsets {
        for s in [o.z1(), o.z2()] {
            slot.entry(key(s)).or_insert_with(|| {
                shifts.push(s);
                shifts.len() - 1
            });
        }
    }
    let table = log_det_table(profile, &shifts, n_samples, seed);
    offsets
        .iter()
        .map(|o| {
            let (i1, i2) = (slot[&key(o.z1())], slot[&key(o.z2())]);
            let l1: Vec<f64> = table.iter().map(|r| r[i1]).collect();
            let l2: Vec<f64> = table.iter().map(|r| r[i2]).collect();
            ratio_from_logdets(&l1, &l2).map(|e| (o.zeta, e))
        })
        .collect()
}

/// One emitted simulation record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub kappa: f64,
    pub z: Complex64,
    pub zeta: Complex64,
    pub n_samples: usize,
    pub seed: u64,
    pub ratio: f64,
    pub stderr_log: f64,
}

impl RunRecord {
    pub fn new(profile: &BandProfile, z: Complex64, zeta: Complex64, seed: u64, est: &RatioEstimate) -> Self {
        Self {
            n: profile.n(),
            w: profile.w(),
            kappa: profile.kappa(),
            z,
            zeta,
            n_samples: est.n_samples,
            seed,
            ratio: est.ratio,
            stderr_log: est.stderr_log,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lse_matches_naive_and_survives_overflow() {
        let xs = [0.1, -2.0, 3.5, 1.25];
        let naive: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&xs), naive, epsilon = 1e-14);
        let big = [1000.0, 1000.0];
        assert_relative_eq!(log_sum_exp(&big), 1000.0 + 2f64.ln(), epsilon = 1e-12);
        let loo = log_sum_exp_loo(&xs);
        for i in 0..xs.len() {
            let rest: Vec<f64> = xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            assert_relative_eq!(loo[i], log_sum_exp(&rest), epsilon = 1e-13);
        }
    }

    #[test]
    fn offsets_are_symmetric() {
        let o = OffsetSpec::new(c(0.3, -0.1), c(0.5, 0.25), 64).unwrap();
        let sum = o.z1() + o.z2();
        assert_relative_eq!(sum.re, 0.6, epsilon = 1e-15);
        assert_relative_eq!(sum.im, -0.2, epsilon = 1e-15);
        let diff = o.z1() - o.z2();
        assert_relative_eq!(diff.re, 2.0 * 0.5 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_offset_gives_exactly_one() {
        let p = BandProfile::new(16, 3.0).unwrap();
        let o = OffsetSpec::new(c(0.2, 0.1), c(0.0, 0.0), 16).unwrap();
        let e = theta_ratio(&p, &o, 50, 9).unwrap();
        assert_eq!(e.ratio, 1.0);
        assert!(e.stderr_log.is_finite());
    }

    #[test]
    fn swapped_offsets_agree_bitwise() {
        let p = BandProfile::new(12, 2.0).unwrap();
        let curve = ratio_curve(&p, c(0.1, 0.0), &[c(0.7, 0.2), c(-0.7, -0.2)], 64, 3).unwrap();
        assert_eq!(curve[0].1.ratio, curve[1].1.ratio);
        assert_eq!(curve[0].1.stderr_log, curve[1].1.stderr_log);
        assert!(curve[0].1.ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn singular_samples_are_excluded() {
        let l1 = [1.0, f64::NEG_INFINITY, 2.0, 0.5];
        let l2 = [0.5, 0.0, 1.0, 0.25];
        let e = ratio_from_logdets(&l1, &l2).unwrap();
        assert_eq!(e.n_samples, 3);
        assert_eq!(e.n_excluded, 1);
        let all = [f64::NEG_INFINITY; 3];
        assert!(matches!(ratio_from_logdets(&all, &all), Err(Error::Estimation(_))));
    }
}
