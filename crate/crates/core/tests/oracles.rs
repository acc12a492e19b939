//! Results cross-checked against independent closed forms and brute-force evaluations.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use bandcorr::blockgate::norm_bound_2x2;
use bandcorr::correlator::{ratio_curve, theta_ratio, OffsetSpec};
use bandcorr::ensemble::{covariance, BandProfile};
use bandcorr::limits::{a0_matrix, critical_limit, matrix_exponential_cross_check, A0Mode};
use bandcorr::linalg::{expm_pade, expm_symmetric, lambda_max, log_absdet_sq_shifted};
use bandcorr::rng::Substream;
use bandcorr::specfun::{quadrature, QuadratureKind};
use bandcorr::transferop::{a_star_spectrum, su2_averages, SU2AverageSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{-x} I_0(x)` from the power series or the large-argument expansion.
fn bessel_i0_scaled(x: f64) -> f64 {
    if x <= 20.0 {
        let q = x * x / 4.0;
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..200 {
            term *= q / (k as f64 * k as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..40 {
            let odd = (2 * k - 1) as f64;
            let next = term * odd * odd / (8.0 * k as f64 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// `⟨1 - P_ℓ(cos θ)⟩` from the one-dimensional Bessel reduction
/// `∫∫ e^{c a cos σ cos γ} dσ dγ = 2π² I_0(ca/2)²`, `a = cos(θ/2)`.
fn su2_oracle(c_conc: f64, ell: usize) -> f64 {
    let gl = quadrature(QuadratureKind::GaussLegendre, 20).unwrap();
    let upper = (60.0 / c_conc.sqrt()).min(PI);
    let panels = 400;
    let (mut num, mut den) = (0.0, 0.0);
    for p in 0..panels {
        let lo = upper * p as f64 / panels as f64;
        let hi = upper * (p + 1) as f64 / panels as f64;
        let (nodes, weights) = gl.mapped(lo, hi);
        for (&th, &w) in nodes.iter().zip(&weights) {
            let a = (th / 2.0).cos();
            let x = c_conc * a / 2.0;
            let i0 = bessel_i0_scaled(x);
            let f = (-c_conc * (1.0 - a)).exp() * i0 * i0;
            let wt = w * th.sin() * f;
            den += wt;
            num += wt * (1.0 - legendre(ell, th.cos()));
        }
    }
    num / den
}

fn legendre(ell: usize, x: f64) -> f64 {
    match ell {
        0 => 1.0,
        1 => x,
        2 => (3.0 * x * x - 1.0) / 2.0,
        3 => (5.0 * x * x * x - 3.0 * x) / 2.0,
        _ => unreachable!(),
    }
}

#[test]
fn su2_tensor_quadrature_matches_bessel_reduction() {
    for (w, tr_s) in [(20.0, 2.0), (30.0, 2.0), (20.0, 8.0)] {
        let spec = SU2AverageSpec { tr_s, ..SU2AverageSpec::new(1, w, 1.0) };
        let reports = su2_averages(&spec, &[1, 2, 3]).unwrap();
        for r in reports {
            let oracle = su2_oracle(spec.concentration(), r.ell);
            assert_relative_eq!(r.one_minus_average, oracle, max_relative = 1e-9);
        }
    }
}

#[test]
fn su2_small_offset_scales_with_concentration() {
    // ⟨1 - P_ℓ⟩ ≈ 2ℓ(ℓ+1)/c for a sharply peaked weight
    let spec = SU2AverageSpec::new(1, 80.0, 1.0);
    let c_conc = spec.concentration();
    for r in su2_averages(&spec, &[1, 2]).unwrap() {
        let l = r.ell as f64;
        assert_relative_eq!(r.one_minus_average, 2.0 * l * (l + 1.0) / c_conc, max_relative = 1e-3);
    }
}

/// `E|h-a|²|h-b|²` for a single complex Gaussian with `E|h|² = σ²`.
fn theta_n1(sigma2: f64, a: Complex64, b: Complex64) -> f64 {
    2.0 * sigma2 * sigma2 + sigma2 * (a + b).norm_sqr() + a.norm_sqr() * b.norm_sqr()
}

#[test]
fn n1_closed_form_matches_two_dimensional_gauss_hermite() {
    let gh = quadrature(QuadratureKind::GaussHermite, 12).unwrap();
    let (a, b) = (c(0.3, -0.2), c(-0.7, 0.4));
    // h = x + iy with x, y ~ N(0, 1/2): the Hermite weight e^{-x²-y²} up to 1/π
    let mut acc = 0.0;
    for (&x, &wx) in gh.nodes.iter().zip(&gh.weights) {
        for (&y, &wy) in gh.nodes.iter().zip(&gh.weights) {
            let h = c(x, y);
            acc += wx * wy * (h - a).norm_sqr() * (h - b).norm_sqr();
        }
    }
    acc /= PI;
    assert_relative_eq!(acc, theta_n1(1.0, a, b), max_relative = 1e-13);
}

#[test]
fn n1_monte_carlo_ratio_agrees_with_closed_form() {
    let profile = BandProfile::new(1, 1.0).unwrap();
    let z = c(0.2, 0.1);
    let zeta = c(0.6, -0.3);
    let o = OffsetSpec::new(z, zeta, 1).unwrap();
    let (z1, z2) = (o.z1(), o.z2());
    let exact = theta_n1(1.0, z1, z2) / (theta_n1(1.0, z1, z1) * theta_n1(1.0, z2, z2)).sqrt();
    let est = theta_ratio(&profile, &o, 40_000, 11).unwrap();
    let err = (est.ratio.ln() - exact.ln()).abs();
    assert!(err <= 4.0 * est.stderr_log, "ratio {} vs {exact}, stderr {}", est.ratio, est.stderr_log);
}

fn det_cofactor(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    let mut sum = c(0.0, 0.0);
    for j in 0..n {
        let minor = m.clone().remove_row(0).remove_column(j);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += m[(0, j)] * det_cofactor(&minor) * sign;
    }
    sum
}

fn random_complex(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = Substream::new(seed, 0);
    DMatrix::from_fn(n, n, |_, _| {
        let (x, y) = rng.normal_pair();
        c(x, y)
    })
}

#[test]
fn log_determinant_matches_cofactor_expansion() {
    for n in 1..=6 {
        for seed in 0..5 {
            let a = random_complex(n, 100 * n as u64 + seed);
            let z = c(0.3, -0.1 * seed as f64);
            let shifted = DMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - z } else { a[(i, j)] });
            let exact = det_cofactor(&shifted).norm_sqr().ln();
            let got = log_absdet_sq_shifted(&a, z);
            assert!((got - exact).abs() <= 1e-11 * exact.abs().max(1.0), "n={n}: {got} vs {exact}");
        }
    }
}

#[test]
fn singular_shift_gives_negative_infinity() {
    let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    assert_eq!(log_absdet_sq_shifted(&a, c(2.0, 0.0)), f64::NEG_INFINITY);
}

fn random_symmetric(n: usize, seed: u64, scale: f64) -> DMatrix<f64> {
    let mut rng = Substream::new(seed, 1);
    let g = DMatrix::from_fn(n, n, |_, _| rng.normal());
    (&g + g.transpose()) * (0.5 * scale)
}

#[test]
fn pade_and_eigendecomposition_exponentials_agree() {
    for seed in 0..10 {
        let n = 3 + seed as usize;
        let a = random_symmetric(n, seed, 1.0 + seed as f64);
        let e = expm_symmetric(&a).unwrap();
        let p = expm_pade(&a).unwrap();
        let scale = e.amax();
        assert!((&e - &p).amax() <= 1e-11 * scale, "seed {seed}");
    }
}

#[test]
fn truncated_a0_exponential_cross_checks() {
    for mode in A0Mode::ALL {
        for kappa_u in [0.1, 1.0, 10.0] {
            let a = a0_matrix(kappa_u, c(0.8, 0.0), 40, mode).unwrap();
            assert!(matrix_exponential_cross_check(&a.entries).unwrap() <= 1e-10);
        }
    }
}

/// `(e^{A}1, 1)` from the Taylor series, for small matrices only.
fn expm00_taylor(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::zeros(n, 1);
    v[(0, 0)] = 1.0;
    let mut term = v.clone();
    let mut sum = v[(0, 0)];
    for k in 1..200 {
        term = a * term / k as f64;
        sum += term[(0, 0)];
        if term.amax() < 1e-18 {
            break;
        }
    }
    sum
}

#[test]
fn critical_limit_matches_taylor_series() {
    for mode in A0Mode::ALL {
        for (kappa_u, zeta) in [(1.0, 0.5), (0.5, 1.0), (3.0, 0.25)] {
            let a = a0_matrix(kappa_u, c(zeta, 0.0), 12, mode).unwrap();
            let got = critical_limit(kappa_u, c(zeta, 0.0), 12, mode).unwrap();
            assert_relative_eq!(got, expm00_taylor(&a.entries), max_relative = 1e-12);
        }
    }
}

/// Largest root of the characteristic cubic of a real symmetric 3×3 matrix.
fn cubic_lambda_max(m: &DMatrix<f64>) -> f64 {
    let tr = m.trace();
    let q = tr / 3.0;
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let p2 = (0..3).map(|i| (m[(i, i)] - q).powi(2)).sum::<f64>() + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = (m - DMatrix::identity(3, 3) * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    q + 2.0 * p * (r.acos() / 3.0).cos()
}

#[test]
fn three_by_three_norm_bound_against_cubic_roots() {
    for seed in 0..50u64 {
        let a = random_symmetric(3, 1000 + seed, 1.0);
        let mc = a.map(|v| c(v, 0.0));
        let exact = cubic_lambda_max(&a);
        assert_relative_eq!(lambda_max(&mc), exact, epsilon = 1e-12);
        let m1 = a[(0, 0)] + 0.1;
        let lower = a.view((1, 1), (2, 2)).into_owned().map(|v| c(v, 0.0));
        let m2 = lambda_max(&lower) + 0.1;
        if (m1 - m2).abs() < 1e-3 {
            continue;
        }
        let v = norm_bound_2x2(&mc, 1, m1, m2).unwrap();
        assert_relative_eq!(v.lambda_max, exact, epsilon = 1e-12);
        let norm12_sq = a[(0, 1)].powi(2) + a[(0, 2)].powi(2);
        assert_relative_eq!(v.correction, norm12_sq / (m1 - m2).abs(), max_relative = 1e-12);
        assert!(v.holds && exact <= v.bound + 1e-12);
    }
}

#[test]
fn nystrom_spectrum_matches_geometric_law() {
    let r = a_star_spectrum(1.0, 50.0, 200, 7).unwrap();
    assert!(r.max_rel_err <= 1e-10);
    assert!(r.max_ratio_err <= 1e-10);
    assert_relative_eq!(r.ground_state.exponent_fit, r.ground_state.exponent_predicted, max_relative = 1e-8);
}

#[test]
fn common_random_numbers_make_curve_symmetric() {
    let p = BandProfile::new(8, 2.0).unwrap();
    let grid = [c(0.4, 0.1), c(-0.4, -0.1), c(0.0, 0.0)];
    let curve = ratio_curve(&p, c(0.1, 0.0), &grid, 64, 5).unwrap();
    assert_eq!(curve[0].1.ratio.to_bits(), curve[1].1.ratio.to_bits());
    assert_eq!(curve[2].1.ratio, 1.0);
}

#[test]
fn covariance_inverts_the_shifted_laplacian() {
    let p = BandProfile::new(12, 3.0).unwrap();
    let j = covariance(&p);
    let w2 = 9.0;
    let a = DMatrix::from_fn(12, 12, |r, s| {
        let lap = if r == s {
            if r == 0 || r == 11 { -1.0 } else { -2.0 }
        } else if r.abs_diff(s) == 1 {
            1.0
        } else {
            0.0
        };
        (if r == s { 1.0 } else { 0.0 }) - w2 * lap
    });
    let prod = a * &j.entries;
    assert!((prod - DMatrix::<f64>::identity(12, 12)).amax() <= 1e-12);
}
