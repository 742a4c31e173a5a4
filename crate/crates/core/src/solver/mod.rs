//! Two-sided min-max levels.
//!
//! `lambda_k^+` is the infimum over `k`-dimensional `V` in `H+` of the largest
//! Rayleigh quotient on `V (+) H-`. For `lambda > a-` the supremum over the
//! `H-` component is explicit, and the level is the unique root of
//! `f_k(lambda) = mu_k(S(lambda)) - lambda` where `S` is the Schur complement.
//! The minus side is the plus side of `-A` with the subspaces exchanged.

pub mod check;
pub mod level;
pub mod merge;
pub mod oracle;
pub mod schur;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use check::{
    merged_spectrum, spectrum_check, spectrum_check_against, LevelMatch, MissedEigenvalue, SpectrumReport,
};
pub use level::{solve_level, solve_levels, DEFAULT_MATRIX_TOL, DEFAULT_PDE_TOL, MAX_ITERATIONS};
pub use merge::{merge_channels, merged_profile, ChannelLevels, MergedLevel, MergedLevels};
pub use oracle::{brute_force_oracle, brute_force_oracle_seeded, ORACLE_MAX_DIM};
pub use schur::{level_objective, schur_complement, SchurEvaluator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            other => Err(format!("unknown side '{other}'")),
        }
    }
}

/// Where a level sits relative to its window. The variant order is the order
/// along the spectrum for the plus side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelStatus {
    /// At or beyond `a-` (plus side) or `a+` (minus side); not an eigenvalue
    /// characterized by the min-max principle.
    ClampedAtA,
    /// Strictly inside the window; an eigenvalue of `A`.
    Interior,
    /// Reached the declared continuum edge.
    ClampedAtB,
}

impl LevelStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelStatus::ClampedAtA => "clamped_at_a",
            LevelStatus::Interior => "interior",
            LevelStatus::ClampedAtB => "clamped_at_b",
        }
    }
}

impl fmt::Display for LevelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LevelStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clamped_at_a" => Ok(LevelStatus::ClampedAtA),
            "interior" => Ok(LevelStatus::Interior),
            "clamped_at_b" => Ok(LevelStatus::ClampedAtB),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub side: Side,
    pub k: usize,
    pub value: f64,
    pub status: LevelStatus,
    /// `|f_k|` at `value`.
    pub residual: f64,
    /// Objective evaluations spent.
    pub iterations: usize,
}
