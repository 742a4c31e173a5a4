//! Concrete operators: the Pauli-type block operator and the radial Dirac
//! operator with a scalar potential, one angular channel at a time.

pub mod analytic;
pub mod dirac;
pub mod grid;
pub mod pauli;
pub mod potential;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use analytic::{analytic_dirac_coulomb_level, analytic_pauli_level};
pub use dirac::{build_dirac_radial, dirac_perturbation, free_basis};
pub use grid::RadialGrid;
pub use pauli::{build_pauli_channel, build_schrodinger_radial, pauli_coupling_perturbation};
pub use potential::PotentialSpec;

use crate::error::{GapError, Result};
use crate::operator::DecomposedOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    Pauli,
    Dirac,
}

/// One angular channel together with its degeneracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub model: ChannelModel,
    pub nu: f64,
    pub l: u32,
    pub kappa: i32,
    pub multiplicity: usize,
}

impl ChannelSpec {
    /// Orbital channel `l`, degeneracy `2l + 1`.
    pub fn pauli(nu: f64, l: u32) -> Self {
        Self {
            model: ChannelModel::Pauli,
            nu,
            l,
            kappa: 0,
            multiplicity: 2 * l as usize + 1,
        }
    }

    /// Relativistic channel `kappa`, degeneracy `2|kappa|`.
    pub fn dirac(nu: f64, kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(GapError::InvalidQuantumNumber("kappa=0".into()));
        }
        let l = if kappa > 0 { kappa as u32 } else { (-kappa - 1) as u32 };
        Ok(Self {
            model: ChannelModel::Dirac,
            nu,
            l,
            kappa,
            multiplicity: 2 * kappa.unsigned_abs() as usize,
        })
    }

    pub fn label(&self) -> String {
        match self.model {
            ChannelModel::Pauli => format!("l={}", self.l),
            ChannelModel::Dirac => format!("kappa={}", self.kappa),
        }
    }

    /// Build the channel operator. Dirac channels take their potential from
    /// `pot`; Pauli channels use `nu`.
    pub fn build(&self, grid: &RadialGrid, pot: &PotentialSpec) -> Result<DecomposedOperator> {
        match self.model {
            ChannelModel::Pauli => build_pauli_channel(self.nu, self.l, grid),
            ChannelModel::Dirac => build_dirac_radial(pot, self.kappa, grid),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
