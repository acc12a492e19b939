//! Classical orthogonal polynomials and Gauss quadrature rules.
//!
//! Hermite polynomials follow the physicists' convention (weight `e^{-t^2}`)
//! everywhere in this crate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};

/// Largest polynomial degree (and quadrature order) accepted.
pub const MAX_DEGREE: usize = 512;

/// Largest Gauss–Hermite order whose unscaled weights are all normal `f64`s.
///
/// Beyond this the outermost weights `w_i` underflow; [`QuadratureRule::scaled_weights`]
/// (`w_i e^{t_i^2}`) stays representable up to [`MAX_DEGREE`] and is what the
/// Nyström discretisation uses.
pub const MAX_HERMITE_UNSCALED_ORDER: usize = 340;

/// Legendre polynomial `P_ell(x)` by the Bonnet recursion.
pub fn legendre_p(ell: usize, x: f64) -> Result<f64> {
    check_degree(ell)?;
    if !(x.abs() <= 1.0) {
        return Err(domain(format!("legendre_p: |x| = {} exceeds 1", x.abs())));
    }
    Ok(legendre_eval(ell, x))
}

/// `P_0(x), ..., P_ell_max(x)`.
pub fn legendre_p_all(ell_max: usize, x: f64) -> Result<Vec<f64>> {
    check_degree(ell_max)?;
    if !(x.abs() <= 1.0) {
        return Err(domain(format!("legendre_p_all: |x| = {} exceeds 1", x.abs())));
    }
    let mut out = Vec::with_capacity(ell_max + 1);
    out.push(1.0);
    if ell_max == 0 {
        return Ok(out);
    }
    out.push(x);
    for l in 1..ell_max {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * out[l] - lf * out[l - 1]) / (lf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// `1 - P_ell(x)` for `ell = 0..=ell_max`, given `h = 1 - x`.
///
/// Runs the Bonnet recursion on `q_ell = 1 - P_ell`, which keeps full relative
/// accuracy when `x` is close to 1 (`h` tiny), where `1 - P_ell(x) ~ ell(ell+1) h / 2`.
pub fn legendre_one_minus_all(ell_max: usize, h: f64) -> Vec<f64> {
    let x = 1.0 - h;
    let mut out = Vec::with_capacity(ell_max + 1);
    out.push(0.0);
    if ell_max == 0 {
        return out;
    }
    out.push(h);
    for l in 1..ell_max {
        let lf = l as f64;
        let next =
            ((2.0 * lf + 1.0) * x * out[l] - lf * out[l - 1] + (2.0 * lf + 1.0) * h) / (lf + 1.0);
        out.push(next);
    }
    out
}

fn legendre_eval(ell: usize, x: f64) -> f64 {
    legendre_with_derivative(ell, x).0
}

/// `(P_n(x), P_n'(x))`, derivative valid for `|x| < 1`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p - lf * p_prev) / (lf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = nf * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Physicists' Hermite polynomial `H_m(t)`.
pub fn hermite_h(m: usize, t: f64) -> Result<f64> {
    check_degree(m)?;
    if m == 0 {
        return Ok(1.0);
    }
    let (mut h_prev, mut h) = (1.0, 2.0 * t);
    for k in 1..m {
        let next = 2.0 * t * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    Ok(h)
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(domain(format!("degree {n} exceeds the cap {MAX_DEGREE}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    GaussLegendre,
    GaussHermite,
}

impl fmt::Display for QuadratureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadratureKind::GaussLegendre => f.write_str("gauss-legendre"),
            QuadratureKind::GaussHermite => f.write_str("gauss-hermite"),
        }
    }
}

impl FromStr for QuadratureKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss-legendre" => Ok(QuadratureKind::GaussLegendre),
            "gauss-hermite" => Ok(QuadratureKind::GaussHermite),
            other => Err(config(format!("unsupported quadrature kind '{other}'"))),
        }
    }
}

/// A Gauss rule: nodes ascending, weights positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    scaled: Vec<f64>,
}

impl QuadratureRule {
    /// Weights with the weight function divided out: `w_i e^{t_i^2}` for
    /// Gauss–Hermite, `w_i` for Gauss–Legendre.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled
    }

    /// `Σ w_i f(t_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// Nodes and weights of a Gauss–Legendre rule affinely mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(self.kind, QuadratureKind::GaussLegendre);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = self.nodes.iter().map(|t| mid + half * t).collect();
        let weights = self.weights.iter().map(|w| half * w).collect();
        (nodes, weights)
    }
}

/// Gauss rule of the given kind and order.
///
/// Nodes come from Newton iteration on the three-term recursion; if Newton
/// fails to converge for some root the Golub–Welsch rule is used instead.
pub fn quadrature(kind: QuadratureKind, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(config("quadrature order must be at least 1"));
    }
    check_degree(order)?;
    if kind == QuadratureKind::GaussHermite && order > MAX_HERMITE_UNSCALED_ORDER {
        return Err(config(format!(
            "gauss-hermite order {order} exceeds {MAX_HERMITE_UNSCALED_ORDER}: weights underflow; \
             use gauss_hermite_scaled"
        )));
    }
    let rule = match kind {
        QuadratureKind::GaussLegendre => gauss_legendre_newton(order),
        QuadratureKind::GaussHermite => gauss_hermite_newton(order),
    };
    match rule {
        Some(r) => Ok(r),
        None => golub_welsch(kind, order),
    }
}

/// Gauss–Hermite nodes with scaled weights `w_i e^{t_i^2}`, for orders up to
/// [`MAX_DEGREE`]. The `weights` field holds the unscaled weights, which may
/// underflow to zero at the outermost nodes for large orders.
pub fn gauss_hermite_scaled(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(config("quadrature order must be at least 1"));
    }
    check_degree(order)?;
    gauss_hermite_newton(order)
        .ok_or_else(|| crate::Error::Accuracy(format!("gauss-hermite Newton failed at order {order}")))
}

const NEWTON_MAX_ITER: usize = 100;

fn gauss_legendre_newton(n: usize) -> Option<QuadratureRule> {
    let nf = n as f64;
    let half = (n + 1) / 2;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            dp = d;
            if dx.abs() <= 1e-15 * x.abs().max(1e-3) {
                converged = true;
                break;
            }
        }
        if !converged {
            return None;
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots come out descending from +1
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Some(QuadratureRule {
        kind: QuadratureKind::GaussLegendre,
        order: n,
        scaled: weights.clone(),
        nodes,
        weights,
    })
}

/// Orthonormal Hermite functions `(psi_n(x), psi_{n-1}(x))`.
fn hermite_functions(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 0.0;
    let mut p = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * p - (kf / (kf + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

fn gauss_hermite_newton(n: usize) -> Option<QuadratureRule> {
    let nf = n as f64;
    let half = (n + 1) / 2;
    let mut pos_nodes = Vec::with_capacity(half);
    let mut pos_scaled = Vec::with_capacity(half);
    let mut x = 0.0_f64;
    // initial guesses for the largest roots follow the classic asymptotic
    // formulas; later roots are extrapolated from the previous ones
    for i in 0..half {
        x = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => x - 1.14 * nf.powf(0.426) / x,
            2 => 1.86 * x - 0.86 * pos_nodes[0],
            3 => 1.91 * x - 0.91 * pos_nodes[1],
            _ => 2.0 * x - pos_nodes[i - 2],
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p1) = hermite_functions(n, x);
            // psi_n' = sqrt(2n) psi_{n-1} - x psi_n
            let dp = (2.0 * nf).sqrt() * p1 - x * p;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() {
            return None;
        }
        let (_, p1) = hermite_functions(n, x);
        pos_nodes.push(x);
        pos_scaled.push(1.0 / (nf * p1 * p1));
    }
    if n % 2 == 1 {
        pos_nodes[half - 1] = 0.0;
        let (_, p1) = hermite_functions(n, 0.0);
        pos_scaled[half - 1] = 1.0 / (nf * p1 * p1);
    }
    // roots must be distinct and strictly decreasing
    if pos_nodes.windows(2).any(|w| w[1] >= w[0]) {
        return None;
    }
    let mut nodes = vec![0.0; n];
    let mut scaled = vec![0.0; n];
    for i in 0..half {
        nodes[i] = -pos_nodes[i];
        nodes[n - 1 - i] = pos_nodes[i];
        scaled[i] = pos_scaled[i];
        scaled[n - 1 - i] = pos_scaled[i];
    }
    let weights = nodes.iter().zip(&scaled).map(|(t, s)| s * (-t * t).exp()).collect();
    Some(QuadratureRule { kind: QuadratureKind::GaussHermite, order: n, nodes, weights, scaled })
}

/// Golub–Welsch rule: eigenvalues of the Jacobi matrix are the nodes, squared
/// first eigenvector components times the zeroth moment are the weights.
pub fn golub_welsch(kind: QuadratureKind, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(config("quadrature order must be at least 1"));
    }
    check_degree(order)?;
    let n = order;
    let (mu0, offdiag): (f64, Box<dyn Fn(usize) -> f64>) = match kind {
        QuadratureKind::GaussLegendre => {
            (2.0, Box::new(|k: usize| k as f64 / ((4 * k * k - 1) as f64).sqrt()))
        }
        QuadratureKind::GaussHermite => (PI.sqrt(), Box::new(|k: usize| (k as f64 / 2.0).sqrt())),
    };
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = offdiag(k);
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let scaled = match kind {
        QuadratureKind::GaussLegendre => weights.clone(),
        QuadratureKind::GaussHermite => {
            nodes.iter().zip(&weights).map(|(t, w)| w * (t * t).exp()).collect()
        }
    };
    Ok(QuadratureRule { kind, order, nodes, weights, scaled })
}

/// Composite Gauss–Legendre rule on consecutive panels `[breaks[i], breaks[i+1]]`.
pub fn composite_legendre(breaks: &[f64], order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if breaks.len() < 2 {
        return Err(config("composite rule needs at least two breakpoints"));
    }
    let base = quadrature(QuadratureKind::GaussLegendre, order)?;
    let mut nodes = Vec::with_capacity(order * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breaks.windows(2) {
        if !(w[1] > w[0]) {
            return Err(config("composite rule breakpoints must increase"));
        }
        let (x, wt) = base.mapped(w[0], w[1]);
        nodes.extend(x);
        weights.extend(wt);
    }
    Ok((nodes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_p(1, 0.3).unwrap(), 0.3);
        // (3 * 0.25 - 1) / 2
        assert_relative_eq!(legendre_p(2, 0.5).unwrap(), -0.125, epsilon = 1e-15);
        assert!(matches!(legendre_p(3, 1.5), Err(crate::Error::Domain(_))));
        assert!(legendre_p(2, f64::NAN).is_err());
        assert!(legendre_p(MAX_DEGREE + 1, 0.0).is_err());
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_h(0, 7.0).unwrap(), 1.0);
        assert_eq!(hermite_h(1, 2.0).unwrap(), 4.0);
        // 8t^3 - 12t at t = 1
        assert_eq!(hermite_h(3, 1.0).unwrap(), -4.0);
    }

    #[test]
    fn one_minus_legendre_matches_direct() {
        for &h in &[1e-9, 1e-4, 0.3, 1.0, 1.7, 2.0] {
            let q = legendre_one_minus_all(30, h);
            let p = legendre_p_all(30, 1.0 - h).unwrap();
            for l in 0..=30 {
                assert!((q[l] - (1.0 - p[l])).abs() < 1e-12, "l={l} h={h}");
            }
        }
        // tiny h: q_l ~ l(l+1) h / 2 to relative accuracy
        let h = 1e-12;
        let q = legendre_one_minus_all(5, h);
        for l in 1..=5 {
            let expect = (l * (l + 1)) as f64 * h / 2.0;
            assert_relative_eq!(q[l], expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn quadrature_examples() {
        let r = quadrature(QuadratureKind::GaussLegendre, 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], 2.0, epsilon = 1e-15);

        let r = quadrature(QuadratureKind::GaussLegendre, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], -s, epsilon = 1e-15);
        assert_relative_eq!(r.nodes[1], s, epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(r.weights[1], 1.0, epsilon = 1e-14);

        let r = quadrature(QuadratureKind::GaussHermite, 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], PI.sqrt(), epsilon = 1e-14);

        assert!(quadrature(QuadratureKind::GaussLegendre, 0).is_err());
        assert!(matches!("gauss-laguerre".parse::<QuadratureKind>(), Err(crate::Error::Config(_))));
    }

    #[test]
    fn newton_and_golub_welsch_agree() {
        for kind in [QuadratureKind::GaussLegendre, QuadratureKind::GaussHermite] {
            for &n in &[3usize, 10, 37, 100] {
                let a = quadrature(kind, n).unwrap();
                let b = golub_welsch(kind, n).unwrap();
                for i in 0..n {
                    assert!((a.nodes[i] - b.nodes[i]).abs() < 1e-11, "{kind} n={n} i={i}");
                    // Golub–Welsch weights only carry absolute accuracy
                    let wmax = a.weights.iter().cloned().fold(0.0, f64::max);
                    assert!(
                        (a.weights[i] - b.weights[i]).abs() <= 1e-10 * a.weights[i] + 1e-13 * wmax,
                        "{kind} n={n} i={i}: {} vs {}",
                        a.weights[i],
                        b.weights[i]
                    );
                }
            }
        }
    }

    #[test]
    fn hermite_scaled_weights_large_order() {
        let r = gauss_hermite_scaled(MAX_DEGREE).unwrap();
        assert!(r.scaled_weights().iter().all(|w| w.is_finite() && *w > 0.0));
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        // ∫ e^{-x^2/2} dx = sqrt(2π) using the scaled weights
        let s: f64 = r
            .nodes
            .iter()
            .zip(r.scaled_weights())
            .map(|(x, w)| w * (-0.5 * x * x).exp())
            .sum();
        assert_relative_eq!(s, (2.0 * PI).sqrt(), max_relative = 1e-13);
        assert!(quadrature(QuadratureKind::GaussHermite, MAX_HERMITE_UNSCALED_ORDER + 1).is_err());
        let edge = quadrature(QuadratureKind::GaussHermite, MAX_HERMITE_UNSCALED_ORDER).unwrap();
        assert!(edge.weights.iter().all(|w| w.is_normal() && *w > 0.0));
    }

    #[test]
    fn composite_rule_integrates_gaussian_peak() {
        let a = 1e-3;
        let breaks = [0.0, 4.0 * a, 8.0 * a, 16.0 * a, 1.0];
        let (x, w) = composite_legendre(&breaks, 32).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (-(x / a).powi(2)).exp()).sum();
        assert_relative_eq!(s, 0.5 * a * PI.sqrt(), max_relative = 1e-13);
    }
}
