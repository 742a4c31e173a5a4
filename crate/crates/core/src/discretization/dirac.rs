//! Radial Dirac operator `H0 + V` in channel `kappa`, split by the sign of the
//! free operator.
//!
//! The two radial components live on staggered meshes. For `kappa < 0` the
//! upper component `G` sits at the nodes `r_i` and the lower component `F` at
//! the midpoints `r_{i+1/2}`; for `kappa > 0` the roles are exchanged. The
//! channel matrix is
//!
//! ```text
//!     [[ 1 + V_G,   D^T    ],
//!      [   D,     -1 + V_F ]]
//! ```
//!
//! where `D` discretizes `d/dr + kappa/r` from the `G` mesh to the `F` mesh.
//! With `B_k` the upper bidiagonal stencil
//! `(B_k u)_{i+1/2} = (u_{i+1} - u_i)/h + k/r_{i+1/2} * (u_i + u_{i+1})/2`,
//! `u_{N+1} = 0`, we take `D = B_kappa` for `kappa < 0` and `D = -B_{-kappa}^T`
//! for `kappa > 0`. The stencil is always applied with a negative `k`: with a
//! positive one it has a near-null vector decaying like `r^-k` from the first
//! node, which shows up as a spurious state at the continuum edge.
//! Interleaving the components by position makes the channel tridiagonal.
//!
//! With `D = W diag(sigma) V^T`, the free eigenvalues are `+-E_j`,
//! `E_j = sqrt(1 + sigma_j^2)`, with eigenvectors `(c_j v_j, s_j w_j)` and
//! `(-s_j v_j, c_j w_j)`, `c_j^2 = (E_j + 1)/(2 E_j)`, `s_j^2 = (E_j - 1)/(2 E_j)`.
//! The positive ones span `H+`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use super::grid::RadialGrid;
use super::potential::PotentialSpec;
use crate::error::{GapError, Result};
use crate::linalg::{self, Tridiagonal};
use crate::operator::DecomposedOperator;

fn check_kappa(kappa: i32) -> Result<()> {
    if kappa == 0 {
        return Err(GapError::InvalidQuantumNumber(
            "invalid relativistic quantum number kappa=0".into(),
        ));
    }
    Ok(())
}

/// Diagonal and superdiagonal of the stencil `B_k`.
fn stencil(k: f64, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let h = grid.h();
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let avg = 0.5 * k / grid.half_node(i);
        diag.push(-1.0 / h + avg);
        if i + 1 < n {
            sup.push(1.0 / h + avg);
        }
    }
    (diag, sup)
}

/// The block `D` (from `G` to `F`) as a dense matrix.
pub fn radial_derivative(kappa: i32, grid: &RadialGrid) -> Result<DMatrix<f64>> {
    check_kappa(kappa)?;
    let n = grid.len();
    let (dd, du) = stencil(-f64::from(kappa.unsigned_abs()), grid);
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        b[(i, i)] = dd[i];
        if i + 1 < n {
            b[(i, i + 1)] = du[i];
        }
    }
    Ok(if kappa < 0 { b } else { -b.transpose() })
}

/// Potential samples `(V_G, V_F)` on the meshes of the two components.
fn component_samples(pot: &PotentialSpec, kappa: i32, grid: &RadialGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    let (nodes, half) = pot.sample(grid)?;
    Ok(if kappa < 0 { (nodes, half) } else { (half, nodes) })
}

/// Eigenbasis of the free channel matrix.
#[derive(Debug, Clone)]
pub struct FreeBasis {
    /// `E_j`, ascending.
    pub energies: Vec<f64>,
    /// Right singular vectors of `D` (columns), acting on `G`.
    pub v: DMatrix<f64>,
    /// Left singular vectors of `D` (columns), acting on `F`.
    pub w: DMatrix<f64>,
}

impl FreeBasis {
    pub fn compute(kappa: i32, grid: &RadialGrid) -> Result<Self> {
        check_kappa(kappa)?;
        let n = grid.len();
        let (dd, du) = stencil(-f64::from(kappa.unsigned_abs()), grid);
        // B^T B is tridiagonal
        let mut btb = DMatrix::zeros(n, n);
        for j in 0..n {
            let above = if j > 0 { du[j - 1] } else { 0.0 };
            btb[(j, j)] = dd[j] * dd[j] + above * above;
            if j + 1 < n {
                let x = dd[j] * du[j];
                btb[(j, j + 1)] = x;
                btb[(j + 1, j)] = x;
            }
        }
        let (sq, right) = linalg::symmetric_eigen(&btb)?;
        let sigma: Vec<f64> = sq.iter().map(|&x| x.max(0.0).sqrt()).collect();
        if sigma[0] <= 0.0 {
            return Err(GapError::Eigen("free radial derivative is singular".into()));
        }
        // left vectors B V / sigma
        let mut left = DMatrix::zeros(n, n);
        for j in 0..n {
            let inv = 1.0 / sigma[j];
            for i in 0..n {
                let next = if i + 1 < n { du[i] * right[(i + 1, j)] } else { 0.0 };
                left[(i, j)] = (dd[i] * right[(i, j)] + next) * inv;
            }
        }
        // one Newton-Schulz step restores the orthonormality lost to the
        // squared singular values
        let gram = left.transpose() * &left;
        let correction = (DMatrix::identity(n, n) * 3.0 - gram) * 0.5;
        let left = &left * correction;
        let energies = sigma.iter().map(|s| (1.0 + s * s).sqrt()).collect();
        // D = B for kappa < 0; D = -B^T = (-right) sigma left^T otherwise
        let (v, w) = if kappa < 0 { (right, left) } else { (left, -right) };
        Ok(Self { energies, v, w })
    }
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `(c_j, s_j)` for every free mode.
    pub fn mixing(&self) -> (Vec<f64>, Vec<f64>) {
        self.energies
            .iter()
            .map(|&e| (((e + 1.0) / (2.0 * e)).sqrt(), ((e - 1.0) / (2.0 * e)).sqrt()))
            .unzip()
    }

    /// Orthogonal matrix whose first `n` columns span `H+` and last `n` span
    /// `H-`, in `[G; F]` coordinates.
    pub fn rotation(&self) -> DMatrix<f64> {
        let n = self.len();
        let (c, s) = self.mixing();
        let mut q = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for i in 0..n {
                q[(i, j)] = c[j] * self.v[(i, j)];
                q[(n + i, j)] = s[j] * self.w[(i, j)];
                q[(i, n + j)] = -s[j] * self.v[(i, j)];
                q[(n + i, n + j)] = c[j] * self.w[(i, j)];
            }
        }
        q
    }
}

type CacheKey = (i32, (u64, usize));
type CacheCell = Arc<OnceLock<Arc<FreeBasis>>>;

fn cache() -> &'static Mutex<HashMap<CacheKey, CacheCell>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, CacheCell>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Free basis for `(kappa, grid)`, computed once and shared.
pub fn free_basis(kappa: i32, grid: &RadialGrid) -> Result<Arc<FreeBasis>> {
    check_kappa(kappa)?;
    let cell = {
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry((kappa, grid.cache_key())).or_default().clone()
    };
    if let Some(b) = cell.get() {
        return Ok(b.clone());
    }
    let computed = Arc::new(FreeBasis::compute(kappa, grid)?);
    // a concurrent caller may have published first; either value is identical
    let _ = cell.set(computed);
    Ok(cell.get().expect("published above").clone())
}

pub fn clear_free_basis_cache() {
    cache().lock().unwrap_or_else(|e| e.into_inner()).clear();
}

fn rotated_potential(basis: &FreeBasis, at_nodes: &[f64], at_half: &[f64]) -> [DMatrix<f64>; 3] {
    let n = basis.len();
    let scale_rows = |m: &DMatrix<f64>, d: &[f64]| {
        let mut out = m.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= d[i];
        }
        out
    };
    let mg = basis.v.transpose() * scale_rows(&basis.v, at_nodes);
    let mf = basis.w.transpose() * scale_rows(&basis.w, at_half);
    let (c, s) = basis.mixing();
    let app = DMatrix::from_fn(n, n, |i, j| c[i] * c[j] * mg[(i, j)] + s[i] * s[j] * mf[(i, j)]);
    let amm = DMatrix::from_fn(n, n, |i, j| s[i] * s[j] * mg[(i, j)] + c[i] * c[j] * mf[(i, j)]);
    let apm = DMatrix::from_fn(n, n, |i, j| -c[i] * s[j] * mg[(i, j)] + s[i] * c[j] * mf[(i, j)]);
    [app, apm, amm]
}

/// Blocks of the multiplication operator `V` in the free splitting. Constant
/// terms land exactly on the block diagonals.
pub fn dirac_perturbation(
    pot: &PotentialSpec,
    kappa: i32,
    grid: &RadialGrid,
) -> Result<DecomposedOperator> {
    check_kappa(kappa)?;
    pot.validate()?;
    let n = grid.len();
    let basis = free_basis(kappa, grid)?;
    let (constant, variable) = pot.split_constant();
    let [mut app, apm, mut amm] = if variable.is_empty() {
        [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)]
    } else {
        let (vg, vf) = component_samples(&PotentialSpec::sum(variable), kappa, grid)?;
        rotated_potential(&basis, &vg, &vf)
    };
    for i in 0..n {
        app[(i, i)] += constant;
        amm[(i, i)] += constant;
    }
    Ok(DecomposedOperator::from_blocks(app, apm, amm)?
        .with_note(format!("dirac potential kappa={kappa} R={} N={n}", grid.r_max())))
}

/// `H0 + V` for channel `kappa`, rotated into the free eigenbasis.
pub fn build_dirac_radial(
    pot: &PotentialSpec,
    kappa: i32,
    grid: &RadialGrid,
) -> Result<DecomposedOperator> {
    let v = dirac_perturbation(pot, kappa, grid)?;
    let basis = free_basis(kappa, grid)?;
    let (mut app, apm, mut amm) = (v.app().clone(), v.apm().clone(), v.amm().clone());
    for (i, e) in basis.energies.iter().enumerate() {
        app[(i, i)] += e;
        amm[(i, i)] -= e;
    }
    Ok(DecomposedOperator::from_blocks(app, apm, amm)?.with_note(format!(
        "dirac kappa={kappa} R={} N={} free-spectral splitting",
        grid.r_max(),
        grid.len()
    )))
}

/// The channel matrix in `[G; F]` coordinates (dimension `2N`).
pub fn dirac_channel_dense(pot: &PotentialSpec, kappa: i32, grid: &RadialGrid) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let d = radial_derivative(kappa, grid)?;
    let (vg, vf) = component_samples(pot, kappa, grid)?;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((n, 0), (n, n)).copy_from(&d);
    m.view_mut((0, n), (n, n)).copy_from(&d.transpose());
    for i in 0..n {
        m[(i, i)] = 1.0 + vg[i];
        m[(n + i, n + i)] = -1.0 + vf[i];
    }
    Ok(m)
}

/// The channel matrix with the unknowns ordered by position, which makes it
/// tridiagonal.
pub fn dirac_channel_tridiagonal(
    pot: &PotentialSpec,
    kappa: i32,
    grid: &RadialGrid,
) -> Result<Tridiagonal> {
    check_kappa(kappa)?;
    let n = grid.len();
    let (dd, du) = stencil(-f64::from(kappa.unsigned_abs()), grid);
    let (vg, vf) = component_samples(pot, kappa, grid)?;
    // node component first in each cell; couplings are the stencil entries
    // up to the overall sign, which does not change the spectrum
    let (on_nodes, on_half, node_mass) = if kappa < 0 { (vg, vf, 1.0) } else { (vf, vg, -1.0) };
    let mut diag = Vec::with_capacity(2 * n);
    let mut off = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        diag.push(node_mass + on_nodes[i]);
        diag.push(-node_mass + on_half[i]);
        off.push(dd[i]);
        if i + 1 < n {
            off.push(du[i]);
        }
    }
    Ok(Tridiagonal::new(diag, off))
}
