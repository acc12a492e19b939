//! Exact `Θ(z1, z2)` for `N ≤ 3` by Wick's theorem.
//!
//! `P = det(H - z1) det(H - z2)` is expanded as a polynomial in the entries of
//! `H`. For independent circular Gaussians, `E[h^a conj(h)^b] = δ_ab a! J^a`,
//! so `Θ = E|P|² = Σ_a |c_a|² Π_e a_e! J_e^{a_e}`.

use std::collections::BTreeMap;

use bandcorr::ensemble::CovarianceMatrix;
use num_complex::Complex64;

use crate::error::{usage, CliError};

/// Largest matrix size handled by the oracle.
pub const MAX_WICK_N: usize = 3;

/// Exponent vector over the `N²` entries, row-major.
type Poly = BTreeMap<Vec<u8>, Complex64>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let k: Vec<u8> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
        }
    }
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for j in 0..n {
            if !prefix.contains(&j) {
                prefix.push(j);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut perms = Vec::new();
    go(&mut Vec::new(), n, &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}

/// `det(H - z)` as a polynomial in the entries.
fn det_poly(n: usize, z: Complex64) -> Poly {
    let one = |k: Vec<u8>, c: Complex64| Poly::from([(k, c)]);
    let mut det = Poly::new();
    for (p, sign) in permutations(n) {
        let mut term = one(vec![0; n * n], Complex64::new(sign, 0.0));
        for (i, &j) in p.iter().enumerate() {
            let mut e = vec![0; n * n];
            e[i * n + j] = 1;
            let mut factor = one(e, Complex64::new(1.0, 0.0));
            if i == j {
                factor.insert(vec![0; n * n], -z);
            }
            term = mul(&term, &factor);
        }
        for (k, c) in term {
            *det.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    det
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).map(f64::from).product()
}

/// `E |det(H - z1)|² |det(H - z2)|²` with `E|h_jk|² = J_jk`.
pub fn theta(j: &CovarianceMatrix, z1: Complex64, z2: Complex64) -> Result<f64, CliError> {
    let n = j.dim();
    if n == 0 || n > MAX_WICK_N {
        return Err(usage("oracle", format!("Wick oracle supports 1 ≤ N ≤ {MAX_WICK_N}, got {n}")));
    }
    let p = mul(&det_poly(n, z1), &det_poly(n, z2));
    let mut total = 0.0;
    for (k, c) in &p {
        let mut moment = c.norm_sqr();
        for (e, &a) in k.iter().enumerate() {
            moment *= factorial(a) * j.entries[(e / n, e % n)].powi(a as i32);
        }
        total += moment;
    }
    Ok(total)
}

/// `Θ(z1, z2) / (Θ(z1, z1) Θ(z2, z2))^{1/2}`.
pub fn ratio(j: &CovarianceMatrix, z1: Complex64, z2: Complex64) -> Result<f64, CliError> {
    Ok(theta(j, z1, z2)? / (theta(j, z1, z1)? * theta(j, z2, z2)?).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use bandcorr::ensemble::{covariance, BandProfile};
    use bandcorr::specfun::{quadrature, QuadratureKind};
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_entry_closed_form() {
        let j = covariance(&BandProfile::new(1, 1.0).unwrap());
        let (a, b) = (c(0.3, 0.4), c(-0.2, 0.1));
        let exact = 2.0 + (a + b).norm_sqr() + a.norm_sqr() * b.norm_sqr();
        assert!((theta(&j, a, b).unwrap() - exact).abs() <= 1e-14);
    }

    #[test]
    fn two_by_two_matches_tensor_gauss_hermite() {
        // |P|² has degree ≤ 4 in each real coordinate, so 3 nodes per axis are exact
        let j = covariance(&BandProfile::new(2, 0.8).unwrap());
        let (z1, z2) = (c(0.2, -0.1), c(-0.3, 0.25));
        let gh = quadrature(QuadratureKind::GaussHermite, 3).unwrap();
        let sd: Vec<f64> = j.entries.iter().map(|v| v.sqrt()).collect();
        let mut acc = 0.0;
        let mut idx = [0usize; 8];
        loop {
            let mut w = 1.0;
            let mut h = DMatrix::<Complex64>::zeros(2, 2);
            for e in 0..4 {
                let (x, y) = (gh.nodes[idx[2 * e]], gh.nodes[idx[2 * e + 1]]);
                w *= gh.weights[idx[2 * e]] * gh.weights[idx[2 * e + 1]] / std::f64::consts::PI;
                // column-major storage matches nalgebra's iteration order
                h[(e % 2, e / 2)] = c(x, y) * sd[e];
            }
            let det = |z: Complex64| (h[(0, 0)] - z) * (h[(1, 1)] - z) - h[(0, 1)] * h[(1, 0)];
            acc += w * (det(z1) * det(z2)).norm_sqr();
            let mut k = 0;
            while k < 8 {
                idx[k] += 1;
                if idx[k] < 3 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == 8 {
                break;
            }
        }
        assert!((theta(&j, z1, z2).unwrap() - acc).abs() <= 1e-12 * acc);
    }

    #[test]
    fn ratio_is_one_on_the_diagonal_and_bounded() {
        let j = covariance(&BandProfile::new(3, 1.0).unwrap());
        assert!((ratio(&j, c(0.1, 0.0), c(0.1, 0.0)).unwrap() - 1.0).abs() <= 1e-14);
        let r = ratio(&j, c(0.4, 0.0), c(-0.4, 0.0)).unwrap();
        assert!(r > 0.0 && r < 1.0);
        assert!(theta(&covariance(&BandProfile::new(4, 1.0).unwrap()), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }
}
