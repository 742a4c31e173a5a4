//! The block operator `diag(1 - Delta - nu/|x|, -(1 - Delta - nu/|x|))`, one
//! angular-momentum sector at a time.

use nalgebra::DMatrix;

use super::grid::RadialGrid;
use crate::error::{GapError, Result};
use crate::operator::DecomposedOperator;

fn check_coupling(nu: f64) -> Result<()> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(GapError::InvalidPotential(format!("coupling nu={nu} must be finite and >= 0")));
    }
    Ok(())
}

/// `1 - d^2/dr^2 + l(l+1)/r^2 - nu/r` on reduced radial functions, Dirichlet at
/// both ends, second-order central differences.
pub fn build_schrodinger_radial(nu: f64, l: u32, grid: &RadialGrid) -> Result<DMatrix<f64>> {
    check_coupling(nu)?;
    let n = grid.len();
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let centrifugal = f64::from(l) * f64::from(l + 1);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let r = grid.node(i);
        m[(i, i)] = 1.0 + 2.0 * inv_h2 + centrifugal / (r * r) - nu / r;
        if i + 1 < n {
            m[(i, i + 1)] = -inv_h2;
            m[(i + 1, i)] = -inv_h2;
        }
    }
    Ok(m)
}

/// The two components of the Pauli-type operator as the splitting; the
/// coupling block is identically zero.
pub fn build_pauli_channel(nu: f64, l: u32, grid: &RadialGrid) -> Result<DecomposedOperator> {
    let h = build_schrodinger_radial(nu, l, grid)?;
    let n = grid.len();
    let amm = -&h;
    Ok(DecomposedOperator::from_blocks(h, DMatrix::zeros(n, n), amm)?
        .with_note(format!("pauli l={l} nu={nu} R={} N={n}", grid.r_max())))
}

/// Derivative of the Pauli channel with respect to `nu`: `diag(-1/r, +1/r)`.
/// Sweeping `A_0 + tau * this` reproduces the family `A_nu` at `nu = tau`.
pub fn pauli_coupling_perturbation(grid: &RadialGrid) -> Result<DecomposedOperator> {
    let n = grid.len();
    let inv_r = nalgebra::DVector::from_iterator(n, grid.nodes().into_iter().map(|r| 1.0 / r));
    let app = DMatrix::from_diagonal(&(-&inv_r));
    let amm = DMatrix::from_diagonal(&inv_r);
    Ok(DecomposedOperator::from_blocks(app, DMatrix::zeros(n, n), amm)?
        .with_note("pauli coupling -1/r"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn stencil_entries() {
        let g = RadialGrid::new(17.0, 16).unwrap();
        let m = build_schrodinger_radial(1.0, 1, &g).unwrap();
        assert_eq!(m[(0, 0)], 1.0 + 2.0 + 2.0 - 1.0);
        assert_eq!(m[(0, 1)], -1.0);
        assert_eq!(m[(0, 2)], 0.0);
    }

    #[test]
    fn free_particle_in_a_box() {
        let g = RadialGrid::new(40.0, 800).unwrap();
        let m = build_schrodinger_radial(0.0, 0, &g).unwrap();
        let lowest = linalg::symmetric_eigenvalue(&m, 0);
        let k = std::f64::consts::PI / 40.0;
        assert!((lowest - (1.0 + k * k)).abs() < 1e-5);
        assert!(lowest > 1.0);
    }

    #[test]
    fn channel_blocks() {
        let g = RadialGrid::new(20.0, 64).unwrap();
        let op = build_pauli_channel(1.0, 0, &g).unwrap();
        assert!(op.is_block_diagonal());
        assert_eq!(op.amm(), &(-op.app()));
        assert!(build_pauli_channel(-1.0, 0, &g).is_err());
    }

    #[test]
    fn coupling_perturbation_reproduces_family() {
        let g = RadialGrid::new(20.0, 64).unwrap();
        let a0 = build_pauli_channel(0.0, 2, &g).unwrap();
        let p = pauli_coupling_perturbation(&g).unwrap();
        let a = a0.add_scaled(1.5, &p).unwrap();
        let direct = build_pauli_channel(1.5, 2, &g).unwrap();
        assert!((a.app() - direct.app()).amax() < 1e-12);
        assert!((a.amm() - direct.amm()).amax() < 1e-12);
    }
}
