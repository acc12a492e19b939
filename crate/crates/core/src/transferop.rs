//! Spectral data of the transfer operator.
//!
//! Two pieces are checked numerically:
//!
//! * the one-dimensional Gaussian factor `A_{*1}` of the quadratic
//!   approximation, whose spectrum is the geometric sequence `λ_*^m`;
//! * the unitary part, whose `ℓ`th sector eigenvalue is approximated by the
//!   weighted SU(2) average of `t^{(ℓ)}_{00}(U) = P_ℓ(cos θ)`.
//!
//! SU(2) is parametrised as `U = T(φ) V(θ) T(ψ) e^{iγ}` with
//! `T(φ) = diag(e^{iφ/2}, e^{-iφ/2})`, `V(θ) = [[cos θ/2, i sin θ/2], [i sin θ/2, cos θ/2]]`,
//! `σ = (φ+ψ)/2`, `δ = (φ-ψ)/2`, and Haar density `sin θ / (8π³)` on
//! `θ ∈ [0, π]`, `σ, δ ∈ [-π, π]`, `γ ∈ [-π/2, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::SpectralParams;
use crate::error::{config, domain, Error, Result};
use crate::specfun::{composite_legendre, gauss_hermite_scaled, legendre_one_minus_all, legendre_p_all, MAX_DEGREE};

/// How the constant in front of `A_{*1}` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KernelNormalization {
    /// `(2 u_*² W / (π λ_*))^{1/2}`: top eigenvalue exactly `λ_*^0 = 1`.
    #[default]
    Unit,
    /// `(u_*² W / (π λ_*))^{1/2}` as displayed; the spectrum is `2^{-1/2} λ_*^m`.
    Literal,
}

impl fmt::Display for KernelNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelNormalization::Unit => f.write_str("unit"),
            KernelNormalization::Literal => f.write_str("literal"),
        }
    }
}

impl FromStr for KernelNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(KernelNormalization::Unit),
            "literal" => Ok(KernelNormalization::Literal),
            other => Err(config(format!("unknown kernel normalization '{other}'"))),
        }
    }
}

/// `A_{*1}(x, y) = p e^{-a x²} e^{-b (x-y)²} e^{-a y²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianKernelSpec {
    pub u_star: f64,
    pub w: f64,
    pub lambda_star: f64,
    pub alpha: f64,
    /// `2 u_*⁴ / W`
    pub a: f64,
    /// `2 W u_*²`
    pub b: f64,
    pub prefactor: f64,
    pub normalization: KernelNormalization,
}

impl GaussianKernelSpec {
    pub fn new(u_star: f64, w: f64, normalization: KernelNormalization) -> Result<Self> {
        let p = SpectralParams::from_u_star(u_star, w)?;
        let u2 = u_star * u_star;
        let base = u2 * w / (PI * p.lambda_star);
        let prefactor = match normalization {
            KernelNormalization::Unit => (2.0 * base).sqrt(),
            KernelNormalization::Literal => base.sqrt(),
        };
        Ok(Self {
            u_star,
            w,
            lambda_star: p.lambda_star,
            alpha: p.alpha,
            a: 2.0 * u2 * u2 / w,
            b: 2.0 * w * u2,
            prefactor,
            normalization,
        })
    }

    /// Exponent `2 u_*² α` of the Gaussian ground state `e^{-γ x²}`.
    pub fn ground_state_exponent(&self) -> f64 {
        2.0 * self.u_star * self.u_star * self.alpha
    }

    /// Leading eigenvalue predicted for this normalisation.
    pub fn top_eigenvalue(&self) -> f64 {
        match self.normalization {
            KernelNormalization::Unit => 1.0,
            KernelNormalization::Literal => 1.0 / SQRT_2,
        }
    }
}

pub fn a_star_1d_kernel(x: f64, y: f64, spec: &GaussianKernelSpec) -> f64 {
    let d = x - y;
    spec.prefactor * (-spec.a * x * x - spec.b * d * d - spec.a * y * y).exp()
}

/// Shape of the leading eigenvector on the central nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateFit {
    /// fitted `γ` in `ψ_0 ∝ e^{-γ x²}`
    pub exponent_fit: f64,
    pub exponent_predicted: f64,
    /// largest absolute residual of the quadratic fit to `ln ψ_0`
    pub residual: f64,
    pub concave: bool,
    /// `max |ψ_0(x) - ψ_0(-x)| / max |ψ_0|`
    pub even_defect: f64,
}

/// Hermite argument scale read off the nodes of `ψ_2`.
///
/// `ψ_2 / ψ_0` is a quadratic in `x` vanishing at `±x_0`. A physicists'
/// `H_2(c x)` vanishes at `c x = 1/√2`, a probabilists' `He_2(c x)` at `c x = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteScaleFit {
    pub psi2_node: f64,
    pub scale_physicists: f64,
    pub scale_probabilists: f64,
    /// `u_* (2α)^{1/2}`
    pub scale_displayed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub u_star: f64,
    pub w: f64,
    pub lambda_star: f64,
    pub normalization: KernelNormalization,
    /// leading Nyström eigenvalues, descending
    pub computed: Vec<f64>,
    /// `top · λ_*^m`, `m = 0..=k_max`
    pub predicted: Vec<f64>,
    pub max_rel_err: f64,
    /// `max_m |computed[m+1]/computed[m] - λ_*|`
    pub max_ratio_err: f64,
    /// largest relative change of the leading eigenvalues when the order doubles
    pub doubling_change: f64,
    pub quad_order: usize,
    pub node_scale: f64,
    pub ground_state: GroundStateFit,
    pub hermite_scale: HermiteScaleFit,
}

/// Relative change allowed between the `n`- and `2n`-node spectra.
pub const SPECTRUM_DOUBLING_TOL: f64 = 1e-9;

struct Nystrom {
    nodes: Vec<f64>,
    sqrt_weights: Vec<f64>,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    scale: f64,
}

/// Scale for the Gauss–Hermite nodes: the outermost node sits 20% beyond the
/// classical turning point of `ψ_{k_max}` plus six ground-state widths.
fn node_scale(spec: &GaussianKernelSpec, order: usize, k_max: usize) -> f64 {
    let width = (2.0 * spec.ground_state_exponent()).sqrt();
    let extent = (((2 * k_max + 1) as f64).sqrt() + 6.0) / width;
    1.2 * extent / (2.0 * order as f64).sqrt()
}

fn nystrom(spec: &GaussianKernelSpec, order: usize, k_max: usize) -> Result<Nystrom> {
    let rule = gauss_hermite_scaled(order)?;
    let scale = node_scale(spec, order, k_max);
    let nodes: Vec<f64> = rule.nodes.iter().map(|t| scale * t).collect();
    let sqrt_weights: Vec<f64> = rule.scaled_weights().iter().map(|w| (scale * w).sqrt()).collect();
    let n = nodes.len();
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = sqrt_weights[i] * a_star_1d_kernel(nodes[i], nodes[j], spec) * sqrt_weights[j];
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(k);
    let mut order_idx: Vec<usize> = (0..n).collect();
    order_idx.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let values = order_idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order_idx[c])]);
    Ok(Nystrom { nodes, sqrt_weights, values, vectors, scale })
}

/// Least squares `y ≈ p + q x²`.
fn fit_even_quadratic(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mut s1, mut s2, mut sy, mut s1y) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x * x;
        s1 += u;
        s2 += u * u;
        sy += y;
        s1y += u * y;
    }
    let det = n * s2 - s1 * s1;
    let q = (n * s1y - s1 * sy) / det;
    let p = (sy - q * s1) / n;
    (p, q)
}

fn eigenfunction(ny: &Nystrom, col: usize) -> Vec<f64> {
    (0..ny.nodes.len()).map(|i| ny.vectors[(i, col)] / ny.sqrt_weights[i]).collect()
}

fn ground_state_fit(spec: &GaussianKernelSpec, ny: &Nystrom) -> GroundStateFit {
    let g = spec.ground_state_exponent();
    let mut psi = eigenfunction(ny, 0);
    if psi.iter().sum::<f64>() < 0.0 {
        psi.iter_mut().for_each(|v| *v = -*v);
    }
    let n = psi.len();
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let even_defect = (0..n).map(|i| (psi[i] - psi[n - 1 - i]).abs()).fold(0.0, f64::max) / peak;
    let central = 2.0 / g.sqrt();
    let idx: Vec<usize> = (0..n).filter(|&i| ny.nodes[i].abs() <= central && psi[i] > 0.0).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| ny.nodes[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| psi[i].ln()).collect();
    let (p, q) = fit_even_quadratic(&xs, &ys);
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - p - q * x * x).abs()).fold(0.0, f64::max);
    let concave = xs.windows(2).zip(ys.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect::<Vec<_>>()
        .windows(2)
        .all(|s| s[1] < s[0]);
    GroundStateFit { exponent_fit: -q, exponent_predicted: g, residual, concave, even_defect }
}

fn hermite_scale_fit(spec: &GaussianKernelSpec, ny: &Nystrom) -> HermiteScaleFit {
    let g = spec.ground_state_exponent();
    let psi0 = eigenfunction(ny, 0);
    let psi2 = eigenfunction(ny, 2);
    let central = 1.5 / g.sqrt();
    let idx: Vec<usize> = (0..psi0.len()).filter(|&i| ny.nodes[i].abs() <= central).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| ny.nodes[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| psi2[i] / psi0[i]).collect();
    let (p, q) = fit_even_quadratic(&xs, &ys);
    let x0 = (-p / q).sqrt();
    HermiteScaleFit {
        psi2_node: x0,
        scale_physicists: 1.0 / (SQRT_2 * x0),
        scale_probabilists: 1.0 / x0,
        scale_displayed: spec.u_star * (2.0 * spec.alpha).sqrt(),
    }
}

/// Nyström spectrum of `A_{*1}` with the default (unit) normalisation.
pub fn a_star_spectrum(u_star: f64, w: f64, quad_order: usize, k_max: usize) -> Result<SpectrumReport> {
    let spec = GaussianKernelSpec::new(u_star, w, KernelNormalization::default())?;
    a_star_spectrum_with(&spec, quad_order, k_max)
}

/// Nyström spectrum of `A_{*1}` on scaled Gauss–Hermite nodes.
///
/// The discretisation is repeated with twice as many nodes and the leading
/// `k_max + 1` eigenvalues must agree to [`SPECTRUM_DOUBLING_TOL`].
pub fn a_star_spectrum_with(spec: &GaussianKernelSpec, quad_order: usize, k_max: usize) -> Result<SpectrumReport> {
    if quad_order < 4 * k_max.max(1) {
        return Err(config(format!("quad_order {quad_order} must be at least 4·k_max = {}", 4 * k_max.max(1))));
    }
    if 2 * quad_order > MAX_DEGREE {
        return Err(config(format!(
            "quad_order {quad_order} too large: the doubling check needs 2·order ≤ {MAX_DEGREE}"
        )));
    }
    let coarse = nystrom(spec, quad_order, k_max)?;
    let fine = nystrom(spec, 2 * quad_order, k_max)?;
    let keep = k_max + 1;
    let computed: Vec<f64> = coarse.values[..keep].to_vec();
    let doubling_change = (0..keep)
        .map(|m| (coarse.values[m] - fine.values[m]).abs() / fine.values[m].abs())
        .fold(0.0, f64::max);
    if !(doubling_change <= SPECTRUM_DOUBLING_TOL) {
        return Err(Error::Accuracy(format!(
            "Nyström spectrum changed by {doubling_change:.3e} (relative) when doubling {quad_order} nodes"
        )));
    }
    let top = spec.top_eigenvalue();
    let predicted: Vec<f64> = (0..keep).map(|m| top * spec.lambda_star.powi(m as i32)).collect();
    let max_rel_err = computed
        .iter()
        .zip(&predicted)
        .map(|(c, p)| ((c - p) / p).abs())
        .fold(0.0, f64::max);
    let max_ratio_err = computed
        .windows(2)
        .map(|v| (v[1] / v[0] - spec.lambda_star).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumReport {
        u_star: spec.u_star,
        w: spec.w,
        lambda_star: spec.lambda_star,
        normalization: spec.normalization,
        computed,
        predicted,
        max_rel_err,
        max_ratio_err,
        doubling_change,
        quad_order,
        node_scale: coarse.scale,
        ground_state: ground_state_fit(spec, &coarse),
        hermite_scale: hermite_scale_fit(spec, &coarse),
    })
}

/// `1 - ℓ(ℓ+1) / (8 (u_* W)²)`.
pub fn lambda_ell(ell: usize, u_star: f64, w: f64) -> f64 {
    let l = ell as f64;
    let uw = u_star * w;
    1.0 - l * (l + 1.0) / (8.0 * uw * uw)
}

/// Smallest per-panel Gauss–Legendre order accepted for SU(2) integrals.
pub const MIN_SU2_ORDER: usize = 32;

/// Largest change allowed in `⟨t^{(ℓ)}_{00}⟩` when every order doubles.
pub const SU2_DOUBLING_TOL: f64 = 1e-8;

/// Parameters of the weighted average
/// `⟨f⟩ = Z_0^{-1} ∫ f(U) exp{-2u_*²W² trS (1 - cos(θ/2) cos σ cos γ)} dU`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU2AverageSpec {
    pub ell: usize,
    pub w: f64,
    pub u_star: f64,
    pub tr_s: f64,
    /// per-panel Gauss–Legendre orders for `(θ, σ, γ)`
    pub orders: [usize; 3],
}

impl SU2AverageSpec {
    pub fn new(ell: usize, w: f64, u_star: f64) -> Self {
        Self { ell, w, u_star, tr_s: 2.0, orders: [MIN_SU2_ORDER; 3] }
    }

    /// `2 u_*² W² trS`, the coefficient in the exponent.
    pub fn concentration(&self) -> f64 {
        2.0 * self.u_star * self.u_star * self.w * self.w * self.tr_s
    }

    fn validate(&self) -> Result<()> {
        if !(self.tr_s > 0.0 && self.tr_s.is_finite()) {
            return Err(domain(format!("su2 average: trS = {} must be positive", self.tr_s)));
        }
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(domain(format!("su2 average: W = {} must be positive", self.w)));
        }
        if !(self.u_star > 0.0 && self.u_star <= 1.0) {
            return Err(domain(format!("su2 average: u_* = {} must lie in (0, 1]", self.u_star)));
        }
        if self.ell > MAX_DEGREE {
            return Err(domain(format!("su2 average: ℓ = {} exceeds {MAX_DEGREE}", self.ell)));
        }
        if self.orders.iter().any(|&o| o < MIN_SU2_ORDER) {
            return Err(config(format!("su2 average: quadrature orders must be at least {MIN_SU2_ORDER}")));
        }
        if self.orders.iter().any(|&o| 2 * o > MAX_DEGREE) {
            return Err(config(format!("su2 average: orders above {} leave no room for doubling", MAX_DEGREE / 2)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU2AverageReport {
    pub ell: usize,
    pub w: f64,
    pub u_star: f64,
    pub tr_s: f64,
    /// `⟨t^{(ℓ)}_{00}⟩`
    pub average: f64,
    /// `⟨1 - t^{(ℓ)}_{00}⟩`, computed without cancellation
    pub one_minus_average: f64,
    pub lambda_ell: f64,
    /// `|⟨t^{(ℓ)}_{00}⟩ - λ_ℓ|`
    pub deviation: f64,
    /// `Z_0` under the unit-mass Haar measure
    pub z0: f64,
    /// `(2π u_*² W² trS)^{-2}`
    pub z0_reference: f64,
    pub doubling_change: f64,
    pub orders: [usize; 3],
}

/// Breakpoints `0, w/2, w, 2w, 4w, ...` capped at `upper`.
pub fn geometric_breaks(width: f64, upper: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 0.5 * width;
    while x < upper {
        b.push(x);
        x *= 2.0;
    }
    b.push(upper);
    b
}

/// `2 sin²(x/2) = 1 - cos x` without cancellation.
fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// θ nodes, θ weights times `sin θ · F(θ)`, and `1 - cos θ` at each node, where
/// `F(θ) = ∫∫ e^{-c(1 - cos(θ/2) cos σ cos γ)} dσ dγ` over the full ranges.
fn theta_profile(c: f64, orders: [usize; 3]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let width = 1.0 / c.sqrt();
    let (th_nodes, th_w) = composite_legendre(&geometric_breaks(2.0 * width, PI), orders[0])?;
    let (sg_nodes, sg_w) = composite_legendre(&geometric_breaks(width, PI), orders[1])?;
    let (ga_nodes, ga_w) = composite_legendre(&geometric_breaks(width, FRAC_PI_2), orders[2])?;
    let sg: Vec<(f64, f64, f64)> = sg_nodes.iter().zip(&sg_w).map(|(&s, &w)| (s.cos(), one_minus_cos(s), w)).collect();
    let ga: Vec<(f64, f64)> = ga_nodes.iter().zip(&ga_w).map(|(&g, &w)| (one_minus_cos(g), w)).collect();
    let weighted: Vec<f64> = th_nodes
        .par_iter()
        .zip(th_w.par_iter())
        .map(|(&th, &wt)| {
            let a = (0.5 * th).cos();
            let h_a = one_minus_cos(0.5 * th);
            let mut inner = 0.0;
            for &(b, h_b, ws) in &sg {
                let mut row = 0.0;
                for &(h_g, wg) in &ga {
                    // 1 - b cos γ = (1 - b) + b (1 - cos γ)
                    row += wg * (-c * a * (h_b + b * h_g)).exp();
                }
                inner += ws * row;
            }
            // σ and γ were integrated over half ranges
            wt * th.sin() * (-c * h_a).exp() * 4.0 * inner
        })
        .collect();
    let one_minus: Vec<f64> = th_nodes.iter().map(|&th| one_minus_cos(th)).collect();
    Ok((th_nodes, weighted, one_minus))
}

/// `(Z_0, ⟨1 - P_ℓ⟩ for ℓ in ells)` at the given orders.
fn su2_moments(c: f64, orders: [usize; 3], ells: &[usize]) -> Result<(f64, Vec<f64>)> {
    let ell_max = ells.iter().copied().max().unwrap_or(0);
    let (_, weighted, one_minus) = theta_profile(c, orders)?;
    let mut num = vec![0.0; ell_max + 1];
    let mut den = 0.0;
    for (&wt, &h) in weighted.iter().zip(&one_minus) {
        den += wt;
        let q = legendre_one_minus_all(ell_max, h);
        for (acc, qi) in num.iter_mut().zip(q) {
            *acc += wt * qi;
        }
    }
    // δ contributes 2π, Haar density sin θ / (8π³)
    let z0 = den * 2.0 * PI / (8.0 * PI * PI * PI);
    Ok((z0, ells.iter().map(|&l| num[l] / den).collect()))
}

/// `⟨t^{(ℓ)}_{00}⟩` for one `ℓ`.
pub fn su2_average_t00(spec: &SU2AverageSpec) -> Result<SU2AverageReport> {
    Ok(su2_averages(spec, &[spec.ell])?.remove(0))
}

/// `⟨t^{(ℓ)}_{00}⟩` for several `ℓ` sharing one θ profile; `spec.ell` is ignored.
///
/// Every order is doubled once and the averages must move by at most
/// [`SU2_DOUBLING_TOL`].
pub fn su2_averages(spec: &SU2AverageSpec, ells: &[usize]) -> Result<Vec<SU2AverageReport>> {
    spec.validate()?;
    if let Some(&l) = ells.iter().find(|&&l| l > MAX_DEGREE) {
        return Err(domain(format!("su2 average: ℓ = {l} exceeds {MAX_DEGREE}")));
    }
    let c = spec.concentration();
    let (z0, q) = su2_moments(c, spec.orders, ells)?;
    let doubled = spec.orders.map(|o| 2 * o);
    let (_, q2) = su2_moments(c, doubled, ells)?;
    let change = q.iter().zip(&q2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if !(change <= SU2_DOUBLING_TOL) {
        return Err(Error::Accuracy(format!(
            "SU(2) average changed by {change:.3e} when doubling orders {:?}",
            spec.orders
        )));
    }
    let z0_reference = (PI * c).powi(-2);
    Ok(ells
        .iter()
        .zip(&q)
        .map(|(&ell, &om)| {
            let lam = lambda_ell(ell, spec.u_star, spec.w);
            SU2AverageReport {
                ell,
                w: spec.w,
                u_star: spec.u_star,
                tr_s: spec.tr_s,
                average: 1.0 - om,
                one_minus_average: om,
                lambda_ell: lam,
                deviation: ((1.0 - lam) - om).abs(),
                z0,
                z0_reference,
                doubling_change: change,
                orders: spec.orders,
            }
        })
        .collect())
}

/// Largest deviation accepted by [`schur_orthogonality_check`].
pub const SCHUR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    /// total Haar mass (should be 1)
    pub mass: f64,
    /// `(ℓ, ∫|t^{(ℓ)}_{00}|² dU, 1/(2ℓ+1))`
    pub entries: Vec<(usize, f64, f64)>,
    pub max_deviation: f64,
}

/// Checks `∫ |t^{(ℓ)}_{00}|² dU = 1/(2ℓ+1)` for `ℓ ≤ ell_max` by tensor
/// Gauss–Legendre quadrature over `(θ, σ, γ)`, with `δ` integrated exactly.
pub fn schur_orthogonality_check(ell_max: usize, orders: [usize; 3]) -> Result<SchurReport> {
    if orders.iter().any(|&o| o == 0) {
        return Err(config("schur check: quadrature orders must be positive"));
    }
    let (th, wt) = composite_legendre(&[0.0, PI], orders[0])?;
    let (_, ws) = composite_legendre(&[-PI, PI], orders[1])?;
    let (_, wg) = composite_legendre(&[-FRAC_PI_2, FRAC_PI_2], orders[2])?;
    let density = 2.0 * PI / (8.0 * PI * PI * PI);
    let mut mass = 0.0;
    let mut acc = vec![0.0; ell_max + 1];
    for (&t, &w_t) in th.iter().zip(&wt) {
        let p = legendre_p_all(ell_max, t.cos())?;
        for &w_s in &ws {
            for &w_g in &wg {
                let w = w_t * w_s * w_g * t.sin() * density;
                mass += w;
                for (a, v) in acc.iter_mut().zip(&p) {
                    *a += w * v * v;
                }
            }
        }
    }
    let entries: Vec<(usize, f64, f64)> =
        acc.iter().enumerate().map(|(l, &v)| (l, v, 1.0 / (2 * l + 1) as f64)).collect();
    let max_deviation = entries
        .iter()
        .map(|(_, v, e)| (v - e).abs())
        .fold((mass - 1.0).abs(), f64::max);
    if !(max_deviation <= SCHUR_TOL) {
        return Err(Error::Convention(format!(
            "Haar measure check failed: deviation {max_deviation:.3e} from Schur orthogonality"
        )));
    }
    Ok(SchurReport { mass, entries, max_deviation })
}

/// Largest defect accepted by [`nu_identity_check`].
pub const NU_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuReport {
    pub points: usize,
    pub max_defect: f64,
}

/// `U(θ, σ, δ, γ)` with `φ = σ + δ`, `ψ = σ - δ`.
pub fn su2_element(theta: f64, sigma: f64, delta: f64, gamma: f64) -> Matrix2<Complex64> {
    let (phi, psi) = (sigma + delta, sigma - delta);
    let t = |a: f64| Matrix2::new(Complex64::from_polar(1.0, a / 2.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -a / 2.0));
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let v = Matrix2::new(Complex64::new(c, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, s), Complex64::new(c, 0.0));
    t(phi) * v * t(psi) * Complex64::from_polar(1.0, gamma)
}

/// `Tr(L U* L U) / 2` with `L = diag(1, -1)`.
pub fn nu_trace(u: &Matrix2<Complex64>) -> f64 {
    let l = Matrix2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0));
    (l * u.adjoint() * l * u).trace().re / 2.0
}

/// Verifies `Tr(L U* L U)/2 = cos θ` on a `points^4` grid over the
/// parameter ranges.
pub fn nu_identity_check(points: usize) -> Result<NuReport> {
    if points < 2 {
        return Err(config("nu check: at least 2 points per axis are required"));
    }
    let grid = |lo: f64, hi: f64| -> Vec<f64> {
        (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
    };
    let (th, sg, de, ga) = (grid(0.0, PI), grid(-PI, PI), grid(-PI, PI), grid(-FRAC_PI_2, FRAC_PI_2));
    let mut max_defect: f64 = 0.0;
    for &t in &th {
        for &s in &sg {
            for &d in &de {
                for &g in &ga {
                    let u = su2_element(t, s, d, g);
                    max_defect = max_defect.max((nu_trace(&u) - t.cos()).abs());
                }
            }
        }
    }
    if !(max_defect <= NU_TOL) {
        return Err(Error::Convention(format!("Tr(L U* L U)/2 = cos θ violated by {max_defect:.3e}")));
    }
    Ok(NuReport { points: points.pow(4), max_defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_values() {
        let spec = GaussianKernelSpec::new(1.0, 10.0, KernelNormalization::Literal).unwrap();
        assert_eq!(a_star_1d_kernel(0.0, 0.0, &spec), spec.prefactor);
        assert_relative_eq!(spec.b / spec.a, 100.0, epsilon = 1e-12);
        let expect = spec.prefactor * (-2.0 * 0.01 / 10.0 * 2.0f64).exp() * (-20.0f64 * 0.04).exp();
        assert_relative_eq!(a_star_1d_kernel(0.1, -0.1, &spec), expect, max_relative = 1e-14);
        assert_eq!(a_star_1d_kernel(0.3, -0.7, &spec), a_star_1d_kernel(-0.7, 0.3, &spec));
    }

    #[test]
    fn lambda_ell_examples() {
        assert_eq!(lambda_ell(0, 0.5, 3.0), 1.0);
        assert_relative_eq!(lambda_ell(1, 1.0, 10.0), 0.9975, epsilon = 1e-15);
        assert_relative_eq!(lambda_ell(2, 0.8, 20.0), 1.0 - 6.0 / 2048.0, epsilon = 1e-15);
    }

    #[test]
    fn nu_identity_corners() {
        let u = su2_element(0.0, 0.4, -1.1, 0.3);
        assert_relative_eq!(nu_trace(&u), 1.0, epsilon = 1e-15);
        let u = su2_element(PI, 0.4, -1.1, 0.3);
        assert_relative_eq!(nu_trace(&u), -1.0, epsilon = 1e-15);
        let u = su2_element(FRAC_PI_2, 2.0, 0.7, -1.2);
        assert!(nu_trace(&u).abs() <= 1e-12);
        assert!(nu_identity_check(7).unwrap().max_defect <= 1e-12);
    }

    #[test]
    fn breaks_cover_interval() {
        let b = geometric_breaks(0.1, PI);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), PI);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
    }
}
