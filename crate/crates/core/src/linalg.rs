//! Dense and tridiagonal symmetric eigenvalue kernels.
//!
//! Dense matrices are reduced to tridiagonal form with Householder reflections
//! (nalgebra) and the tridiagonal problem is solved here, either completely by
//! implicit QL or for a single index by Sturm-sequence bisection. Matrices that
//! are already tridiagonal skip the reduction.

use nalgebra::linalg::SymmetricTridiagonal;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GapError, Result};

const QL_MAX_SWEEPS: usize = 60;

/// Largest |m_ij - m_ji| divided by max(1, max |m_ij|).
pub fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut scale = 0.0f64;
    let mut asym = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(m[(i, j)].abs());
            if i < j {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
    }
    asym / scale.max(1.0)
}

/// Replace `m` by (m + m^T) / 2 in place.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Symmetric tridiagonal matrix: `diag` has length n, `off` has length n-1.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Extract the tridiagonal part of `m` when every other entry is exactly zero.
    pub fn detect(m: &DMatrix<f64>) -> Option<Self> {
        let n = m.nrows();
        for j in 0..n {
            for i in 0..n {
                if i.abs_diff(j) > 1 && m[(i, j)] != 0.0 {
                    return None;
                }
            }
        }
        let diag = (0..n).map(|i| m[(i, i)]).collect();
        let off = (1..n).map(|i| m[(i, i - 1)]).collect();
        Some(Self { diag, off })
    }

    /// Orthogonally similar tridiagonal form of a dense symmetric matrix.
    pub fn reduce(m: &DMatrix<f64>) -> Self {
        if let Some(t) = Self::detect(m) {
            return t;
        }
        let (d, e) = SymmetricTridiagonal::new(m.clone()).unpack_tridiagonal();
        Self {
            diag: d.iter().copied().collect(),
            off: e.iter().copied().collect(),
        }
    }

    fn pivmin(&self) -> f64 {
        let emax = self.off.iter().fold(1.0f64, |a, &e| a.max(e * e));
        f64::MIN_POSITIVE * emax
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDL^T inertia).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.len() {
            let coupling = if i > 0 { self.off[i - 1] * self.off[i - 1] / q } else { 0.0 };
            q = self.diag[i] - x - coupling;
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalue with 0-based ascending index `idx`, by bisection.
    pub fn eigenvalue(&self, idx: usize) -> f64 {
        assert!(idx < self.len(), "eigenvalue index out of range");
        if self.len() == 1 {
            return self.diag[0];
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        let pivmin = self.pivmin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin || mid == lo || mid == hi {
                break;
            }
            if self.count_below(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in ascending order (implicit QL without vectors).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut d = self.diag.clone();
        if n <= 1 {
            return Ok(d);
        }
        let mut e: Vec<f64> = self.off.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > QL_MAX_SWEEPS {
                    return Err(GapError::Eigen(format!(
                        "tridiagonal QL did not converge for eigenvalue {l} of {n}"
                    )));
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
                let mut deflated = false;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    Tridiagonal::reduce(m).eigenvalues()
}

/// Eigenvalue of a symmetric matrix with 0-based ascending index `idx`.
pub fn symmetric_eigenvalue(m: &DMatrix<f64>, idx: usize) -> f64 {
    Tridiagonal::reduce(m).eigenvalue(idx)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or_else(|| GapError::Eigen(format!("dense symmetric eigensolver failed (n={n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> Tridiagonal {
        Tridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    fn laplacian_exact(n: usize, j: usize) -> f64 {
        let theta = std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64;
        2.0 - 2.0 * theta.cos()
    }

    #[test]
    fn ql_matches_closed_form_laplacian() {
        let n = 50;
        let vals = laplacian(n).eigenvalues().unwrap();
        for (j, v) in vals.iter().enumerate() {
            assert!((v - laplacian_exact(n, j)).abs() < 1e-13);
        }
    }

    #[test]
    fn bisection_matches_closed_form_laplacian() {
        let n = 40;
        let t = laplacian(n);
        for j in [0, 1, 17, 39] {
            assert!((t.eigenvalue(j) - laplacian_exact(n, j)).abs() < 1e-13);
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), n);
    }

    #[test]
    fn dense_paths_agree() {
        let n = 12;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            (a * 0.37 + b * 1.3).sin() + if i == j { i as f64 } else { 0.0 }
        });
        let ql = symmetric_eigenvalues(&m).unwrap();
        let (full, vecs) = symmetric_eigen(&m).unwrap();
        for j in 0..n {
            assert!((ql[j] - full[j]).abs() < 1e-12);
            assert!((symmetric_eigenvalue(&m, j) - full[j]).abs() < 1e-12);
        }
        let resid = &m * &vecs - &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(full));
        assert!(resid.amax() < 1e-11);
    }

    #[test]
    fn detect_rejects_dense() {
        let mut m = DMatrix::<f64>::identity(4, 4);
        assert!(Tridiagonal::detect(&m).is_some());
        m[(0, 2)] = 1e-30;
        assert!(Tridiagonal::detect(&m).is_none());
    }

    #[test]
    fn asymmetry_is_relative() {
        let m = DMatrix::from_row_slice(2, 2, &[1e6, 1.0, 1.0 + 1e-3, 0.0]);
        assert!((relative_asymmetry(&m) - 1e-9).abs() < 1e-15);
    }
}
