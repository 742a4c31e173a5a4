//! Eigenvalues in spectral gaps from two-sided min-max levels.
//!
//! An operator is given as blocks over a splitting `H = H+ (+) H-`
//! ([`DecomposedOperator`]). The levels
//!
//! ```text
//! lambda_k^+ = inf_{V in H+, dim V = k}  sup_{x in V (+) H-} (x, Ax) / |x|^2
//! lambda_k^- = sup_{V in H-, dim V = k}  inf_{x in V (+) H+} (x, Ax) / |x|^2
//! ```
//!
//! are eigenvalues of `A` above `a-` (resp. below `a+`), counted from the gap
//! edge, whenever they lie strictly inside the declared window. They are
//! computed by [`solve_level`] and checked against full diagonalization by
//! [`spectrum_check`].
//!
//! ```
//! use gapspec::{gap_profile, solve_level, DecomposedOperator, Side};
//! use nalgebra::DMatrix;
//!
//! let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, -2.0]);
//! let op = DecomposedOperator::from_full(&a, 1).unwrap();
//! let profile = gap_profile(&op, f64::INFINITY, f64::NEG_INFINITY).unwrap();
//! let level = solve_level(&op, &profile, 1, Side::Plus, 1e-12).unwrap();
//! assert!((level.value - 5f64.sqrt()).abs() < 1e-12);
//! ```

pub mod cli;
pub mod continuation;
pub mod discretization;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod solver;

pub use continuation::{sweep, verify_uniform_bounds, Branch, SweepConfig, UniformBoundsReport};
pub use error::{GapError, Result};
pub use operator::{gap_profile, negate_and_swap, DecomposedOperator, GapOrdering, GapProfile};
pub use solver::{
    brute_force_oracle, level_objective, schur_complement, solve_level, solve_levels, spectrum_check,
    LevelResult, LevelStatus, Side, SpectrumReport,
};
