//! Dense and tridiagonal linear-algebra kernels shared by the modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Result};

/// Real tridiagonal matrix stored by diagonals.
///
/// `lower[i]` sits at `(i + 1, i)` and `upper[i]` at `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.lower[i];
                m[(i, i + 1)] = self.upper[i];
            }
        }
        m
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Solves `T x = rhs` by the Thomas algorithm (no pivoting).
///
/// Intended for diagonally dominant systems; a vanishing pivot is reported
/// as a domain error.
pub fn thomas_solve(t: &Tridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = t.dim();
    if rhs.len() != n {
        return Err(domain(format!("thomas_solve: rhs length {} != {n}", rhs.len())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = t.diag[0];
    if piv == 0.0 {
        return Err(domain("thomas_solve: zero pivot"));
    }
    if n > 1 {
        c[0] = t.upper[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = t.diag[i] - t.lower[i - 1] * c[i - 1];
        if piv == 0.0 {
            return Err(domain("thomas_solve: zero pivot"));
        }
        if i + 1 < n {
            c[i] = t.upper[i] / piv;
        }
        d[i] = (rhs[i] - t.lower[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// `ln |det(A - z I)|^2` by partially pivoted LU.
///
/// Works in place on a copy, column by column to follow nalgebra's
/// column-major storage. Returns `-inf` if a pivot column is exactly zero.
pub fn log_absdet_sq_shifted(a: &DMatrix<Complex64>, z: Complex64) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "log_absdet_sq: matrix must be square");
    let mut lu = a.clone();
    for i in 0..n {
        lu[(i, i)] -= z;
    }
    let mut acc = 0.0;
    for k in 0..n {
        let (mut p, mut best) = (k, 0.0);
        for i in k..n {
            let v = lu[(i, k)].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return f64::NEG_INFINITY;
        }
        if p != k {
            lu.swap_rows(p, k);
        }
        acc += best.ln();
        let inv = lu[(k, k)].inv();
        for i in k + 1..n {
            lu[(i, k)] *= inv;
        }
        for j in k + 1..n {
            let ukj = lu[(k, j)];
            if ukj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (head, tail) = lu.as_mut_slice().split_at_mut(j * n);
            let col_k = &head[k * n..k * n + n];
            let col_j = &mut tail[..n];
            for i in k + 1..n {
                col_j[i] -= col_k[i] * ukj;
            }
        }
    }
    acc
}

/// Maximum absolute deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest eigenvalue of a Hermitian matrix (`-inf` for an empty matrix).
pub fn lambda_max(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Operator 2-norm of an arbitrary complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Asymmetry allowed for a "symmetric" input, relative to its largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(domain("matrix_exponential: matrix is not square"));
    }
    let scale = a.amax().max(1.0);
    let n = a.nrows();
    for j in 0..n {
        for i in 0..j {
            let d = (a[(i, j)] - a[(j, i)]).abs();
            if d > SYMMETRY_TOL * scale {
                return Err(domain(format!(
                    "matrix_exponential: asymmetry {d:.3e} at ({i},{j}) exceeds tolerance"
                )));
            }
        }
    }
    Ok(())
}

/// `e^A` for real symmetric `A` through its eigendecomposition.
pub fn expm_symmetric(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(a.clone());
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let e = lam.exp();
        scaled.column_mut(j).scale_mut(e);
    }
    let out = &scaled * q.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

/// `(e^A)_{00}` for symmetric `A`: `Σ_j q_{0j}^2 e^{λ_j}`.
pub fn expm_symmetric_00(a: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(a)?;
    if a.nrows() == 0 {
        return Err(domain("matrix_exponential: empty matrix"));
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut terms: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &lam)| (lam, eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    // smallest contributions first
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(terms.iter().map(|(lam, w)| w * lam.exp()).sum())
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `e^A` for any square real `A` by scaling and squaring with the degree-13
/// Padé approximant.
pub fn expm_pade(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(domain("expm_pade: matrix is not square"));
    }
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * 2f64.powi(-s);
    let id = DMatrix::<f64>::identity(n, n);
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| domain("expm_pade: singular denominator"))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thomas_matches_dense() {
        let t = Tridiagonal {
            lower: vec![-1.0, 0.5, 2.0],
            diag: vec![4.0, 5.0, 6.0, 7.0],
            upper: vec![1.0, -2.0, 0.25],
        };
        let rhs = [1.0, 2.0, 3.0, 4.0];
        let x = thomas_solve(&t, &rhs).unwrap();
        let back = t.apply(&x);
        for (b, r) in back.iter().zip(rhs) {
            assert_relative_eq!(*b, r, epsilon = 1e-14);
        }
        let dense = t.to_dense().lu().solve(&nalgebra::DVector::from_column_slice(&rhs)).unwrap();
        for i in 0..4 {
            assert_relative_eq!(x[i], dense[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn logdet_small_cases() {
        let zero = DMatrix::from_element(1, 1, Complex64::new(0.0, 0.0));
        assert_relative_eq!(log_absdet_sq_shifted(&zero, Complex64::new(2.0, 0.0)), 4f64.ln(), epsilon = 1e-15);
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert_relative_eq!(log_absdet_sq_shifted(&id, Complex64::new(3.0, 0.0)), 16f64.ln(), epsilon = 1e-14);
        assert_eq!(log_absdet_sq_shifted(&id, Complex64::new(1.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn expm_diagonal_and_zero() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm_symmetric(&z).unwrap(), DMatrix::identity(3, 3));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2f64.ln(), 3f64.ln()]));
        let e = expm_symmetric(&d).unwrap();
        assert_relative_eq!(e[(0, 0)], 2.0, epsilon = 1e-14);
        assert_relative_eq!(e[(1, 1)], 3.0, epsilon = 1e-14);
        assert_relative_eq!(e[(0, 1)], 0.0, epsilon = 1e-15);
        let p = expm_pade(&d).unwrap();
        assert_relative_eq!(p[(0, 0)], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(expm_symmetric(&a), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn expm_pade_rotation() {
        // e^{[[0,-t],[t,0]]} is a rotation by t
        let t = 7.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm_pade(&a).unwrap();
        assert_relative_eq!(e[(0, 0)], t.cos(), epsilon = 1e-12);
        assert_relative_eq!(e[(1, 0)], t.sin(), epsilon = 1e-12);
    }
}
