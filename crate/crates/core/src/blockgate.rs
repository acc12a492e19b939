//! Numerical checkers for two block-matrix eigenvalue bounds.
//!
//! A Hermitian matrix `M` is split into `n2` square blocks of equal size,
//! grouped as `0 = [0, n0)`, `1 = [n0, n1)`, `2 = [n1, n2)` (block indices are
//! zero-based here). Under hypotheses
//!
//! 1. `n1 - n0 > c ln²(n2)`,
//! 2. `M_kj = 0` for `|j - k| > p0` whenever `min(j, k) < n1`,
//! 3. `D := blockdiag M^{(11)} < -C1` and `‖M^{(11)} - D‖ ≤ q C1 / 2`,
//! 4. `M^{(22)} ≤ -C1` and `‖M^{(12)}‖² < q'(1 - q)(C1 / 2)²`,
//!
//! the top eigenvalue of `M` exceeds that of the leading `0 ⊕ 1` part by at
//! most `δ0^{1/2}`, `δ0 = q^{(n1 - n0)/p0}`; the resolvent of `M^{(11)}` decays
//! like `q^{|j-k|/p0}`; and the spectral projection above `-C1/2` decays
//! geometrically into groups 1 and 2.
//!
//! For a Hermitian `2 × 2` block matrix with `M^{(11)} < m1`, `M^{(22)} < m2`,
//! `m1 ≠ m2`: `λ_max(M) ≤ max(m1, m2) + ‖M^{(12)}‖² / |m1 - m2|`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::linalg::{hermitian_defect, lambda_max, spectral_norm};
use crate::rng::Substream;

/// Slack allowed when comparing a measured quantity with its bound.
pub const VERDICT_TOL: f64 = 1e-10;

/// Tolerance on `‖M - M*‖` for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub p0: usize,
    /// `C1 > 0`
    pub c1: f64,
    pub q: f64,
    pub q_prime: f64,
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    /// size of every block `P_k`
    pub block_dim: usize,
    /// constant `c` in hypothesis 1
    pub gap_c: f64,
}

impl GateParams {
    pub fn validate(&self) -> Result<()> {
        if self.p0 == 0 || self.block_dim == 0 {
            return Err(config("gate params: p0 and block_dim must be positive"));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(config(format!("gate params: C1 = {} must be positive", self.c1)));
        }
        if !(self.q > 0.0 && self.q < 1.0) || !(self.q_prime > 0.0 && self.q_prime < 1.0) {
            return Err(config(format!(
                "gate params: q = {} and q' = {} must lie in (0, 1)",
                self.q, self.q_prime
            )));
        }
        if !(self.n0 >= 1 && self.n0 < self.n1 && self.n1 < self.n2) {
            return Err(config(format!(
                "gate params: need 1 ≤ n0 < n1 < n2, got {} {} {}",
                self.n0, self.n1, self.n2
            )));
        }
        if !(self.gap_c >= 0.0) {
            return Err(config("gate params: gap constant must be non-negative"));
        }
        Ok(())
    }

    /// `q^{(n1 - n0)/p0}`
    pub fn delta0(&self) -> f64 {
        self.q.powf((self.n1 - self.n0) as f64 / self.p0 as f64)
    }

    pub fn dim(&self) -> usize {
        self.n2 * self.block_dim
    }

    fn range(&self, lo: usize, hi: usize) -> std::ops::Range<usize> {
        lo * self.block_dim..hi * self.block_dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateScenario {
    pub m: DMatrix<Complex64>,
    pub params: GateParams,
    pub seed: u64,
    pub violate: Option<usize>,
}

impl GateScenario {
    fn block(&self, r: std::ops::Range<usize>, c: std::ops::Range<usize>) -> DMatrix<Complex64> {
        self.m.view((r.start, c.start), (r.len(), c.len())).into_owned()
    }

    fn group(&self, a: usize, b: usize) -> DMatrix<Complex64> {
        let p = &self.params;
        let bounds = [(0, p.n0), (p.n0, p.n1), (p.n1, p.n2)];
        let (ra, rb) = (p.range(bounds[a].0, bounds[a].1), p.range(bounds[b].0, bounds[b].1));
        self.block(ra, rb)
    }

    /// `M^{(11)}`
    pub fn m11(&self) -> DMatrix<Complex64> {
        self.group(1, 1)
    }

    /// Leading part built from groups 0 and 1.
    pub fn leading(&self) -> DMatrix<Complex64> {
        let d = self.params.n1 * self.params.block_dim;
        self.block(0..d, 0..d)
    }
}

/// Outcome of the four hypotheses, in order.
pub type Hypotheses = [bool; 4];

fn ensure_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(domain("block matrix must be square"));
    }
    let d = hermitian_defect(m);
    let scale = m.iter().fold(1.0f64, |a, v| a.max(v.norm()));
    if d > HERMITIAN_TOL * scale {
        return Err(domain(format!("block matrix is not Hermitian (defect {d:.3e})")));
    }
    Ok(())
}

/// Block-diagonal part of `M^{(11)}`.
fn block_diagonal(m11: &DMatrix<Complex64>, b: usize) -> DMatrix<Complex64> {
    let n = m11.nrows();
    DMatrix::from_fn(n, n, |i, j| if i / b == j / b { m11[(i, j)] } else { Complex64::new(0.0, 0.0) })
}

pub fn check_hypotheses(s: &GateScenario) -> Result<Hypotheses> {
    let p = &s.params;
    p.validate()?;
    if s.m.nrows() != p.dim() {
        return Err(domain(format!("scenario matrix has size {} but params imply {}", s.m.nrows(), p.dim())));
    }
    ensure_hermitian(&s.m)?;
    let b = p.block_dim;

    let h1 = (p.n1 - p.n0) as f64 > p.gap_c * (p.n2 as f64).ln().powi(2);

    let mut h2 = true;
    'outer: for k in 0..p.n2 {
        for j in 0..p.n2 {
            if k.min(j) < p.n1 && k.abs_diff(j) > p.p0 {
                for r in 0..b {
                    for c in 0..b {
                        if s.m[(k * b + r, j * b + c)] != Complex64::new(0.0, 0.0) {
                            h2 = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }

    let m11 = s.m11();
    let d = block_diagonal(&m11, b);
    let diag_ok = (0..p.n1 - p.n0).all(|k| {
        let blk = d.view((k * b, k * b), (b, b)).into_owned();
        lambda_max(&blk) < -p.c1
    });
    let h3 = diag_ok && spectral_norm(&(&m11 - &d)) <= p.q * p.c1 / 2.0;

    let m22 = s.group(2, 2);
    let m12 = s.group(1, 2);
    let h4 = lambda_max(&m22) <= -p.c1
        && spectral_norm(&m12).powi(2) < p.q_prime * (1.0 - p.q) * (p.c1 / 2.0).powi(2);

    Ok([h1, h2, h3, h4])
}

fn require(h: &Hypotheses, which: &[usize]) -> Result<()> {
    for &i in which {
        if !h[i - 1] {
            return Err(Error::Precondition { index: i, reason: hypothesis_name(i).to_string() });
        }
    }
    Ok(())
}

fn hypothesis_name(i: usize) -> &'static str {
    match i {
        1 => "gap n1 - n0 > c ln²(n2)",
        2 => "banded block support",
        3 => "D < -C1 and ‖M11 - D‖ ≤ q C1/2",
        4 => "M22 ≤ -C1 and ‖M12‖² < q'(1-q)(C1/2)²",
        _ => "m1 ≠ m2",
    }
}

/// Worst ratio of a resolvent block norm to `2 (C1(1-q))^{-1} q^{|j-k|/p0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventDecay {
    pub z: f64,
    pub worst_ratio: f64,
    pub holds: bool,
}

pub fn resolvent_decay_check(s: &GateScenario, z: f64) -> Result<ResolventDecay> {
    let h = check_hypotheses(s)?;
    require(&h, &[3])?;
    resolvent_unchecked(s, z)
}

fn resolvent_unchecked(s: &GateScenario, z: f64) -> Result<ResolventDecay> {
    let p = &s.params;
    if !(z > -p.c1 / 2.0) {
        return Err(domain(format!("resolvent check: z = {z} must exceed -C1/2 = {}", -p.c1 / 2.0)));
    }
    let m11 = s.m11();
    let n = m11.nrows();
    let shifted = &m11 - DMatrix::<Complex64>::identity(n, n) * Complex64::new(z, 0.0);
    let r = shifted
        .try_inverse()
        .ok_or_else(|| Error::Precondition { index: 3, reason: "M11 - z is singular".into() })?;
    let b = p.block_dim;
    let nb = n / b;
    let scale = 2.0 / (p.c1 * (1.0 - p.q));
    let mut worst: f64 = 0.0;
    for j in 0..nb {
        for k in 0..nb {
            let blk = r.view((j * b, k * b), (b, b)).into_owned();
            let bound = scale * p.q.powf(j.abs_diff(k) as f64 / p.p0 as f64);
            worst = worst.max(spectral_norm(&blk) / bound);
        }
    }
    Ok(ResolventDecay { z, worst_ratio: worst, holds: worst <= 1.0 + VERDICT_TOL })
}

/// The ten shifts `-C1/2 + 1.5 C1 i / 10`, `i = 1..=10`, covering `(-C1/2, C1]`.
pub fn resolvent_grid(c1: f64) -> Vec<f64> {
    (1..=10).map(|i| -c1 / 2.0 + 1.5 * c1 * i as f64 / 10.0).collect()
}

/// `‖E P_k‖` for blocks `k ≥ n0`, with `E` the spectral projection of `M`
/// above `-C1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDecay {
    /// entry `i` is block `n0 + i`
    pub profile: Vec<f64>,
    pub envelope: Vec<f64>,
    pub rank: usize,
    /// `2 p0 √rank / q`
    pub envelope_constant: f64,
    /// largest `profile / envelope`
    pub worst_ratio: f64,
    /// `profile[p0] / profile[0]`, to compare with `q`
    pub step_ratio: f64,
    pub holds: bool,
}

pub fn projection_decay_check(s: &GateScenario) -> Result<ProjectionDecay> {
    let h = check_hypotheses(s)?;
    require(&h, &[1, 2, 3, 4])?;
    Ok(projection_unchecked(s))
}

fn projection_unchecked(s: &GateScenario) -> ProjectionDecay {
    let p = &s.params;
    let b = p.block_dim;
    let eig = SymmetricEigen::new(s.m.clone());
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > -p.c1 / 2.0).collect();
    let rank = keep.len();
    let v = DMatrix::from_fn(s.m.nrows(), rank, |r, c| eig.eigenvectors[(r, keep[c])]);
    let m10 = s.group(1, 0);
    let coupling = spectral_norm(&m10);
    let envelope_constant = 2.0 * p.p0 as f64 * (rank.max(1) as f64).sqrt() / p.q;
    let tail = p.delta0().sqrt();
    let mut profile = Vec::with_capacity(p.n2 - p.n0);
    let mut envelope = Vec::with_capacity(p.n2 - p.n0);
    for k in p.n0..p.n2 {
        let rows = v.rows(k * b, b).into_owned();
        profile.push(if rank == 0 { 0.0 } else { spectral_norm(&rows) });
        let dist = (k + 1 - p.n0) as f64;
        envelope.push(
            envelope_constant / (p.c1 * (1.0 - p.q)) * coupling * p.q.powf(dist / p.p0 as f64) + tail,
        );
    }
    let worst_ratio = profile.iter().zip(&envelope).map(|(a, e)| a / e).fold(0.0, f64::max);
    let step_ratio = if profile.len() > p.p0 && profile[0] > 0.0 { profile[p.p0] / profile[0] } else { f64::NAN };
    ProjectionDecay {
        profile,
        envelope,
        rank,
        envelope_constant,
        worst_ratio,
        step_ratio,
        holds: worst_ratio <= 1.0 + VERDICT_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub seed: u64,
    pub params: GateParams,
    pub hypotheses_hold: Hypotheses,
    pub lambda_max_actual: f64,
    pub lambda_max_leading: f64,
    pub delta0: f64,
    /// `λ_max(leading) + δ0^{1/2}`
    pub ct1_bound: f64,
    pub ct1_holds: bool,
    pub ct1_slack: f64,
    /// `λ_max(leading) ≥ -C1/2`; outside this regime the bound can fail
    pub leading_in_regime: bool,
    pub projection_decay_profile: Vec<f64>,
    pub projection_worst_ratio: f64,
    pub projection_holds: bool,
    pub resolvent_decay_worst_ratio: f64,
    pub resolvent_holds: bool,
}

/// Evaluates all three conclusions; the hypotheses must hold.
pub fn ct_bound(s: &GateScenario) -> Result<GateReport> {
    let h = check_hypotheses(s)?;
    require(&h, &[1, 2, 3, 4])?;
    let p = &s.params;
    let lambda_max_actual = lambda_max(&s.m);
    let lambda_max_leading = lambda_max(&s.leading());
    let delta0 = p.delta0();
    let ct1_bound = lambda_max_leading + delta0.sqrt();
    let ct1_slack = ct1_bound - lambda_max_actual;
    let proj = projection_unchecked(s);
    let mut worst: f64 = 0.0;
    for z in resolvent_grid(p.c1) {
        worst = worst.max(resolvent_unchecked(s, z)?.worst_ratio);
    }
    Ok(GateReport {
        seed: s.seed,
        params: *p,
        hypotheses_hold: h,
        lambda_max_actual,
        lambda_max_leading,
        delta0,
        ct1_bound,
        ct1_holds: lambda_max_actual <= ct1_bound + VERDICT_TOL,
        ct1_slack,
        leading_in_regime: lambda_max_leading >= -p.c1 / 2.0,
        projection_decay_profile: proj.profile,
        projection_worst_ratio: proj.worst_ratio,
        projection_holds: proj.holds,
        resolvent_decay_worst_ratio: worst,
        resolvent_holds: worst <= 1.0 + VERDICT_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormVerdict {
    pub lambda_max: f64,
    /// `max(m1, m2) + ‖M12‖² / |m1 - m2|`
    pub bound: f64,
    /// `‖M12‖² / |m1 - m2|`
    pub correction: f64,
    pub holds: bool,
}

/// Checks the `2 × 2` block bound with the first block of size `split`.
pub fn norm_bound_2x2(m: &DMatrix<Complex64>, split: usize, m1: f64, m2: f64) -> Result<NormVerdict> {
    ensure_hermitian(m)?;
    let n = m.nrows();
    if split == 0 || split >= n {
        return Err(domain(format!("norm bound: split {split} must lie in 1..{n}")));
    }
    if m1 == m2 {
        return Err(Error::Precondition { index: 3, reason: hypothesis_name(0).into() });
    }
    let a = m.view((0, 0), (split, split)).into_owned();
    let c = m.view((split, split), (n - split, n - split)).into_owned();
    if !(lambda_max(&a) < m1) {
        return Err(Error::Precondition { index: 1, reason: "M11 < m1".into() });
    }
    if !(lambda_max(&c) < m2) {
        return Err(Error::Precondition { index: 2, reason: "M22 < m2".into() });
    }
    let off = m.view((0, split), (split, n - split)).into_owned();
    let correction = spectral_norm(&off).powi(2) / (m1 - m2).abs();
    let bound = m1.max(m2) + correction;
    let lm = lambda_max(m);
    Ok(NormVerdict { lambda_max: lm, bound, correction, holds: lm <= bound + VERDICT_TOL })
}

fn cnormal(rng: &mut Substream) -> Complex64 {
    let (x, y) = rng.normal_pair();
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// Random Hermitian matrix supported on block pairs with
/// `lo ≤ |j - k| ≤ hi`, rescaled to spectral norm `norm`.
fn banded_hermitian(rng: &mut Substream, nb: usize, b: usize, lo: usize, hi: usize, norm: f64) -> DMatrix<Complex64> {
    let n = nb * b;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let d = (i / b).abs_diff(j / b);
            if d < lo || d > hi {
                continue;
            }
            if i == j {
                m[(i, i)] = Complex64::new(rng.normal(), 0.0);
            } else {
                let v = cnormal(rng);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
    }
    let s = spectral_norm(&m);
    if s > 0.0 {
        m *= Complex64::new(norm / s, 0.0);
    }
    m
}

/// Random `r × c` matrix rescaled to spectral norm `norm`.
fn dense_block(rng: &mut Substream, r: usize, c: usize, norm: f64) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_fn(r, c, |_, _| cnormal(rng));
    let s = spectral_norm(&m);
    if s > 0.0 {
        m *= Complex64::new(norm / s, 0.0);
    }
    m
}

/// Builds a scenario satisfying all four hypotheses, or breaking exactly the
/// one named by `violate` (1..=4).
///
/// * group 1: diagonal `D` uniform in `(-3 C1, -1.5 C1)` plus a banded
///   perturbation with zero diagonal blocks and norm `0.9 q C1 / 2`;
/// * group 2: diagonal uniform in `(-3 C1, -1.5 C1)` plus a dense perturbation
///   of norm `0.25 C1`;
/// * `M^{(12)}` on the `p0 × p0` corner with `‖M^{(12)}‖² = 0.9 q'(1-q)(C1/2)²`;
/// * `M^{(10)}` on its corner with norm uniform in `(0.25, 1) C1`;
/// * group 0: banded with norm `C1` around a diagonal uniform in `(-C1, C1)`,
///   shifted up if needed so that its top eigenvalue is at least a uniform
///   draw from `(0, C1/2)`.
///
/// The shift matters: when every eigenvalue of the leading part lies below
/// `-C1/2` the top of `M` can come from group 2 and exceed the bound.
///
/// Violations: 1 raises the gap constant, 2 adds a block just outside the band
/// between groups 0 and 1, 3 scales the group-1 perturbation by 10, 4 scales
/// `M^{(12)}` by 2.
pub fn scenario_generator(seed: u64, params: GateParams, violate: Option<usize>) -> Result<GateScenario> {
    params.validate()?;
    if let Some(v) = violate {
        if !(1..=4).contains(&v) {
            return Err(config(format!("violate must be 1..=4, got {v}")));
        }
    }
    let p = params;
    let b = p.block_dim;
    if p.n1 - p.n0 < p.p0 + 2 {
        return Err(config(format!("group 1 needs at least p0 + 2 = {} blocks", p.p0 + 2)));
    }
    let mut rng = Substream::new(seed, 0);
    let n = p.dim();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let c1 = p.c1;

    let (g0, g1, g2) = (p.n0, p.n1 - p.n0, p.n2 - p.n1);
    let put = |m: &mut DMatrix<Complex64>, r0: usize, c0: usize, blk: &DMatrix<Complex64>| {
        for j in 0..blk.ncols() {
            for i in 0..blk.nrows() {
                m[(r0 + i, c0 + j)] = blk[(i, j)];
            }
        }
    };

    let mut m00 = banded_hermitian(&mut rng, g0, b, 0, p.p0, c1);
    for i in 0..g0 * b {
        m00[(i, i)] += rng.uniform(-c1, c1);
    }
    // keep the leading part above -C1/2, the regime the bound addresses
    let top = lambda_max(&m00);
    let floor = rng.uniform(0.0, 0.5) * c1;
    if top < floor {
        for i in 0..g0 * b {
            m00[(i, i)] += floor - top;
        }
    }
    put(&mut m, 0, 0, &m00);

    let pert_scale = if violate == Some(3) { 10.0 } else { 1.0 };
    let mut m11 = banded_hermitian(&mut rng, g1, b, 1, p.p0, pert_scale * 0.9 * p.q * c1 / 2.0);
    for i in 0..g1 * b {
        m11[(i, i)] += rng.uniform(-3.0 * c1, -1.5 * c1);
    }
    put(&mut m, g0 * b, g0 * b, &m11);

    let mut m22 = dense_block(&mut rng, g2 * b, g2 * b, 1.0);
    m22 = (&m22 + m22.adjoint()) * Complex64::new(0.5, 0.0);
    let s22 = spectral_norm(&m22);
    if s22 > 0.0 {
        m22 *= Complex64::new(0.25 * c1 / s22, 0.0);
    }
    for i in 0..g2 * b {
        m22[(i, i)] += rng.uniform(-3.0 * c1, -1.5 * c1);
    }
    put(&mut m, p.n1 * b, p.n1 * b, &m22);

    // corners: last p0 blocks of one group against first p0 of the next
    let w10 = p.p0.min(g0) * b;
    let h10 = p.p0.min(g1) * b;
    let norm10 = rng.uniform(0.25, 1.0) * c1;
    let m10 = dense_block(&mut rng, h10, w10, norm10);
    let m10 = mask_band(m10, p.n0 * b, p.n0 * b - w10, b, p.p0);
    put(&mut m, p.n0 * b, p.n0 * b - w10, &m10);
    put(&mut m, p.n0 * b - w10, p.n0 * b, &m10.adjoint());

    let c12_scale = if violate == Some(4) { 2.0 } else { 1.0 };
    let norm12 = c12_scale * (0.9 * p.q_prime * (1.0 - p.q)).sqrt() * c1 / 2.0;
    let h21 = p.p0.min(g2) * b;
    let w21 = p.p0.min(g1) * b;
    let m21 = dense_block(&mut rng, h21, w21, 1.0);
    let mut m21 = mask_band(m21, p.n1 * b, p.n1 * b - w21, b, p.p0);
    let s21 = spectral_norm(&m21);
    m21 *= Complex64::new(norm12 / s21, 0.0);
    put(&mut m, p.n1 * b, p.n1 * b - w21, &m21);
    put(&mut m, p.n1 * b - w21, p.n1 * b, &m21.adjoint());

    let mut params = p;
    match violate {
        Some(1) => {
            let gap = (p.n1 - p.n0) as f64;
            params.gap_c = 2.0 * gap / (p.n2 as f64).ln().powi(2);
        }
        Some(2) => {
            // block (n0 + p0, n0 - 1) is p0 + 1 apart
            let v = Complex64::new(1e-3 * c1, 0.0);
            let (r, c) = ((p.n0 + p.p0) * b, (p.n0 - 1) * b);
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
        _ => {}
    }
    Ok(GateScenario { m, params, seed, violate })
}

/// Zeroes the entries of a coupling block (placed at `(r0, c0)`) whose block
/// distance exceeds `p0`.
fn mask_band(mut blk: DMatrix<Complex64>, r0: usize, c0: usize, b: usize, p0: usize) -> DMatrix<Complex64> {
    for j in 0..blk.ncols() {
        for i in 0..blk.nrows() {
            if ((r0 + i) / b).abs_diff((c0 + j) / b) > p0 {
                blk[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    blk
}

/// Parameters used by the randomized suite for a given seed: `q` cycles
/// through `{0.1, 0.3, 0.6}`, `p0` through `{1, 2, 3}`, blocks have size 1 or
/// 2, the gap is the smallest allowed by hypothesis 1 with `c = 1`, and group 2
/// spans at least four times the gap in scalar dimension. Sizes stay ≤ 120.
pub fn suite_params(seed: u64) -> GateParams {
    const QS: [f64; 3] = [0.1, 0.3, 0.6];
    let q = QS[(seed % 3) as usize];
    let p0 = 1 + ((seed / 3) % 3) as usize;
    let block_dim = 1 + ((seed / 9) % 2) as usize;
    let n0 = 1 + ((seed / 18) % 3) as usize;
    let q_prime = [0.5, 0.9][((seed / 54) % 2) as usize];
    let gap_c = 1.0;
    let mut gap = p0 + 2;
    loop {
        let g2 = (4 * gap).div_ceil(block_dim);
        let n2 = n0 + gap + g2;
        if gap as f64 > gap_c * (n2 as f64).ln().powi(2) {
            return GateParams { p0, c1: 1.0, q, q_prime, n0, n1: n0 + gap, n2, block_dim, gap_c };
        }
        gap += 1;
    }
}

/// Random `2 × 2` block scenario for the norm bound: returns the matrix, the
/// split and `(m1, m2)`. Odd seeds use a small margin and weak coupling so
/// that the bound is nearly attained.
pub fn norm_scenario(seed: u64, max_dim: usize) -> (DMatrix<Complex64>, usize, f64, f64) {
    let mut rng = Substream::new(seed, 1);
    let max_dim = max_dim.max(2);
    let n = 2 + (rng.next_u64() % (max_dim as u64 - 1)) as usize;
    let split = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
    let mut a = dense_block(&mut rng, n, n, 1.0);
    a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let tight = seed % 2 == 1;
    let coupling = if tight { 1e-2 } else { rng.uniform(0.1, 2.0) };
    let s = spectral_norm(&a.view((0, split), (split, n - split)).into_owned());
    for j in split..n {
        for i in 0..split {
            let v = a[(i, j)] * Complex64::new(coupling / s, 0.0);
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    let shift = rng.uniform(-2.0, 2.0);
    for i in split..n {
        a[(i, i)] += Complex64::new(shift, 0.0);
    }
    let l1 = lambda_max(&a.view((0, 0), (split, split)).into_owned());
    let l2 = lambda_max(&a.view((split, split), (n - split, n - split)).into_owned());
    let margin = |rng: &mut Substream| if tight { 1e-6 } else { rng.uniform(0.01, 1.0) };
    let m1 = l1 + margin(&mut rng);
    let mut m2 = l2 + margin(&mut rng);
    if m1 == m2 {
        m2 += 1e-9;
    }
    (a, split, m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> GateParams {
        GateParams { p0: 1, c1: 1.0, q: 0.3, q_prime: 0.5, n0: 2, n1: 26, n2: 122, block_dim: 1, gap_c: 1.0 }
    }

    #[test]
    fn diagonal_matrix_satisfies_everything() {
        let p = GateParams { n2: 40, n1: 20, n0: 2, gap_c: 0.5, ..params() };
        let m = DMatrix::from_diagonal_element(p.dim(), p.dim(), Complex64::new(-2.0, 0.0));
        let s = GateScenario { m, params: p, seed: 0, violate: None };
        assert_eq!(check_hypotheses(&s).unwrap(), [true; 4]);
        let r = resolvent_decay_check(&s, 0.0).unwrap();
        // only diagonal blocks survive: (1/2) / (2 / (1 - q))
        assert!((r.worst_ratio - 0.5 * 0.7 / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_breaks_hypothesis_three() {
        let p = GateParams { n2: 40, n1: 20, n0: 2, gap_c: 0.5, ..params() };
        let s = GateScenario { m: DMatrix::zeros(p.dim(), p.dim()), params: p, seed: 0, violate: None };
        let h = check_hypotheses(&s).unwrap();
        assert!(!h[2]);
        assert!(matches!(ct_bound(&s), Err(Error::Precondition { index: 3, .. })));
    }

    #[test]
    fn generator_is_deterministic_and_targets_violations() {
        let p = suite_params(5);
        let a = scenario_generator(11, p, None).unwrap();
        let b = scenario_generator(11, p, None).unwrap();
        assert_eq!(a.m, b.m);
        assert_eq!(check_hypotheses(&a).unwrap(), [true; 4]);
        for v in 1..=4 {
            let s = scenario_generator(11, p, Some(v)).unwrap();
            let h = check_hypotheses(&s).unwrap();
            for (i, ok) in h.iter().enumerate() {
                assert_eq!(*ok, i + 1 != v, "violate {v}: {h:?}");
            }
        }
    }

    #[test]
    fn bound_needs_leading_part_above_threshold() {
        // all hypotheses hold, yet group 2 carries the top eigenvalue
        let p = GateParams { n0: 1, n1: 11, n2: 20, gap_c: 0.1, ..params() };
        let mut diag = vec![-2.0; p.dim()];
        diag[0] = -5.0;
        for v in diag.iter_mut().skip(p.n1) {
            *v = -1.2;
        }
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            p.dim(),
            diag.into_iter().map(|x| Complex64::new(x, 0.0)),
        ));
        let s = GateScenario { m, params: p, seed: 0, violate: None };
        let r = ct_bound(&s).unwrap();
        assert_eq!(r.hypotheses_hold, [true; 4]);
        assert!(!r.leading_in_regime);
        assert!(!r.ct1_holds);
    }

    #[test]
    fn non_hermitian_rejected() {
        let p = GateParams { n2: 40, n1: 20, n0: 2, gap_c: 0.5, ..params() };
        let mut m = DMatrix::from_diagonal_element(p.dim(), p.dim(), Complex64::new(-2.0, 0.0));
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        let s = GateScenario { m, params: p, seed: 0, violate: None };
        assert!(matches!(check_hypotheses(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_bound_scalar_case() {
        let (a, b, c) = (-1.0, -3.0, Complex64::new(0.5, 0.5));
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(a, 0.0), c, c.conj(), Complex64::new(b, 0.0)]);
        let v = norm_bound_2x2(&m, 1, -0.5, -2.5).unwrap();
        let exact = ((a + b) + ((a - b) * (a - b) + 4.0 * c.norm_sqr()).sqrt()) / 2.0;
        assert!((v.lambda_max - exact).abs() < 1e-12);
        assert!(v.holds);
        assert!(matches!(norm_bound_2x2(&m, 1, -0.5, -0.5), Err(Error::Precondition { index: 3, .. })));
    }
}
