//! Closed-form reference levels for the two exactly solvable models.

use crate::error::{GapError, Result};
use crate::solver::Side;

/// Hydrogen-like level of the Pauli-type operator: `+-(1 - nu^2 / (4 n^2))`.
pub fn analytic_pauli_level(nu: f64, n: u32, side: Side) -> Result<f64> {
    if n < 1 {
        return Err(GapError::InvalidQuantumNumber(format!("principal number n={n} must be >= 1")));
    }
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(GapError::InvalidPotential(format!("coupling nu={nu} must be finite and >= 0")));
    }
    let n = f64::from(n);
    let e = 1.0 - nu * nu / (4.0 * n * n);
    Ok(match side {
        Side::Plus => e,
        Side::Minus => -e,
    })
}

/// Bound state of the Dirac operator with potential `-nu/r` in channel `kappa`
/// with `n_r` radial nodes: `[1 + nu^2 / (n_r + sqrt(kappa^2 - nu^2))^2]^(-1/2)`.
pub fn analytic_dirac_coulomb_level(nu: f64, kappa: i32, n_r: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&nu) {
        return Err(GapError::InvalidPotential(format!("Coulomb strength nu={nu} outside [0, 1)")));
    }
    if kappa == 0 {
        return Err(GapError::InvalidQuantumNumber("kappa must be nonzero".into()));
    }
    if kappa > 0 && n_r == 0 {
        return Err(GapError::InvalidQuantumNumber(format!(
            "kappa={kappa} > 0 requires at least one radial node"
        )));
    }
    let k = f64::from(kappa);
    let gamma = (k * k - nu * nu).sqrt();
    let denom = f64::from(n_r) + gamma;
    Ok((1.0 + nu * nu / (denom * denom)).powf(-0.5))
}
