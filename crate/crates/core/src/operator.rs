//! Self-adjoint operators stored as 2x2 blocks over an orthogonal splitting
//! `H = H+ (+) H-`, and the gap-window diagnostics derived from them.
//!
//! In finite dimension every subspace lies in the form domain, so the core on
//! which the variational levels are taken is the whole space and needs no
//! separate representation.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::linalg;

/// Relative tolerance for the Hermitian check on input blocks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Stand-in for an infinite continuum edge.
pub const UNBOUNDED_EDGE: f64 = 1e9;

/// A real symmetric operator split as `[[app, apm], [apm^T, amm]]`.
///
/// The lower-left block is never stored; the assembled matrix is symmetric by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedOperator {
    app: DMatrix<f64>,
    apm: DMatrix<f64>,
    amm: DMatrix<f64>,
    basis_note: String,
}

fn check_hermitian(block: &'static str, m: &DMatrix<f64>) -> Result<()> {
    let asymmetry = linalg::relative_asymmetry(m);
    if asymmetry > HERMITIAN_TOL || !asymmetry.is_finite() {
        return Err(GapError::NonHermitian { block, asymmetry });
    }
    Ok(())
}

impl DecomposedOperator {
    /// Validate and symmetrize the three stored blocks.
    pub fn from_blocks(
        mut app: DMatrix<f64>,
        apm: DMatrix<f64>,
        mut amm: DMatrix<f64>,
    ) -> Result<Self> {
        let (np, nm) = (app.nrows(), amm.nrows());
        if np == 0 || nm == 0 {
            return Err(GapError::DimensionMismatch(format!(
                "both subspaces must be non-trivial (n+={np}, n-={nm})"
            )));
        }
        if app.ncols() != np || amm.ncols() != nm {
            return Err(GapError::DimensionMismatch(format!(
                "diagonal blocks must be square, got {}x{} and {}x{}",
                app.nrows(),
                app.ncols(),
                amm.nrows(),
                amm.ncols()
            )));
        }
        if apm.shape() != (np, nm) {
            return Err(GapError::DimensionMismatch(format!(
                "coupling block must be {np}x{nm}, got {}x{}",
                apm.nrows(),
                apm.ncols()
            )));
        }
        if apm.iter().any(|x| !x.is_finite()) {
            return Err(GapError::DimensionMismatch("coupling block has non-finite entries".into()));
        }
        check_hermitian("app", &app)?;
        check_hermitian("amm", &amm)?;
        linalg::symmetrize(&mut app);
        linalg::symmetrize(&mut amm);
        Ok(Self {
            app,
            apm,
            amm,
            basis_note: String::new(),
        })
    }

    /// Split a full symmetric matrix along its first `n_plus` coordinates.
    pub fn from_full(full: &DMatrix<f64>, n_plus: usize) -> Result<Self> {
        let n = full.nrows();
        if full.ncols() != n {
            return Err(GapError::DimensionMismatch(format!(
                "full matrix must be square, got {}x{}",
                n,
                full.ncols()
            )));
        }
        if n_plus == 0 || n_plus >= n {
            return Err(GapError::DimensionMismatch(format!(
                "n_plus={n_plus} must lie in 1..{n}"
            )));
        }
        check_hermitian("full", full)?;
        let nm = n - n_plus;
        let app = full.view((0, 0), (n_plus, n_plus)).into_owned();
        let amm = full.view((n_plus, n_plus), (nm, nm)).into_owned();
        let upper = full.view((0, n_plus), (n_plus, nm));
        let lower = full.view((n_plus, 0), (nm, n_plus));
        let apm = DMatrix::from_fn(n_plus, nm, |i, j| 0.5 * (upper[(i, j)] + lower[(j, i)]));
        Ok(Self::from_blocks(app, apm, amm)?.with_note("coordinate-aligned splitting"))
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.basis_note = note.into();
        self
    }

    pub fn app(&self) -> &DMatrix<f64> {
        &self.app
    }

    pub fn apm(&self) -> &DMatrix<f64> {
        &self.apm
    }

    pub fn amm(&self) -> &DMatrix<f64> {
        &self.amm
    }

    pub fn basis_note(&self) -> &str {
        &self.basis_note
    }

    pub fn n_plus(&self) -> usize {
        self.app.nrows()
    }

    pub fn n_minus(&self) -> usize {
        self.amm.nrows()
    }

    pub fn dim(&self) -> usize {
        self.n_plus() + self.n_minus()
    }

    /// True when the coupling block is exactly zero.
    pub fn is_block_diagonal(&self) -> bool {
        self.apm.iter().all(|&x| x == 0.0)
    }

    /// The full matrix `[[app, apm], [apm^T, amm]]`.
    pub fn assemble(&self) -> DMatrix<f64> {
        let (np, nm) = (self.n_plus(), self.n_minus());
        let mut full = DMatrix::zeros(np + nm, np + nm);
        full.view_mut((0, 0), (np, np)).copy_from(&self.app);
        full.view_mut((np, np), (nm, nm)).copy_from(&self.amm);
        full.view_mut((0, np), (np, nm)).copy_from(&self.apm);
        full.view_mut((np, 0), (nm, np)).copy_from(&self.apm.transpose());
        full
    }

    /// `-A` with the roles of the two subspaces exchanged.
    pub fn negate_and_swap(&self) -> Self {
        Self {
            app: -&self.amm,
            apm: -self.apm.transpose(),
            amm: -&self.app,
            basis_note: self.basis_note.clone(),
        }
    }

    /// `A + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.n_plus() {
            out.app[(i, i)] += c;
        }
        for i in 0..out.n_minus() {
            out.amm[(i, i)] += c;
        }
        out
    }

    /// `A + tau * B` for an operator `B` on the same splitting.
    pub fn add_scaled(&self, tau: f64, other: &DecomposedOperator) -> Result<Self> {
        if other.n_plus() != self.n_plus() || other.n_minus() != self.n_minus() {
            return Err(GapError::DimensionMismatch(format!(
                "perturbation splitting {}+{} differs from operator splitting {}+{}",
                other.n_plus(),
                other.n_minus(),
                self.n_plus(),
                self.n_minus()
            )));
        }
        let mut out = self.clone();
        if tau != 0.0 {
            out.app += &other.app * tau;
            out.apm += &other.apm * tau;
            out.amm += &other.amm * tau;
        }
        Ok(out)
    }

    /// Spectrum of the assembled matrix, ascending. Block-diagonal operators
    /// are diagonalized block by block.
    pub fn full_spectrum(&self) -> Result<Vec<f64>> {
        let mut eigs = if self.is_block_diagonal() {
            let mut v = linalg::symmetric_eigenvalues(&self.app)?;
            v.extend(linalg::symmetric_eigenvalues(&self.amm)?);
            v
        } else {
            linalg::symmetric_eigenvalues(&self.assemble())?
        };
        eigs.sort_by(f64::total_cmp);
        Ok(eigs)
    }

    /// Parse the whitespace-separated matrix text format: a header line
    /// `n_plus n_minus` followed by the full matrix in row-major order.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut header = |name: &str| -> Result<usize> {
            let tok = tokens
                .next()
                .ok_or_else(|| GapError::Parse(format!("missing {name} in header")))?;
            tok.parse::<usize>()
                .map_err(|_| GapError::Parse(format!("invalid {name} '{tok}'")))
        };
        let np = header("n_plus")?;
        let nm = header("n_minus")?;
        let n = np + nm;
        let mut data = Vec::with_capacity(n * n);
        for tok in tokens {
            let x: f64 = tok
                .parse()
                .map_err(|_| GapError::Parse(format!("invalid matrix entry '{tok}'")))?;
            if !x.is_finite() {
                return Err(GapError::Parse(format!("non-finite matrix entry '{tok}'")));
            }
            data.push(x);
        }
        if data.len() != n * n {
            return Err(GapError::Parse(format!(
                "expected {} matrix entries for n={n}, found {}",
                n * n,
                data.len()
            )));
        }
        let full = DMatrix::from_row_slice(n, n, &data);
        Self::from_full(&full, np)
    }

    pub fn to_text(&self) -> String {
        let full = self.assemble();
        let n = full.nrows();
        let mut out = format!("{} {}\n", self.n_plus(), self.n_minus());
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:.17e}", full[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// How the extreme Rayleigh quotients of the two subspaces are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapOrdering {
    /// `a- < a+`.
    Separated,
    /// `a+ <= a-`; eigenvalues in `[a+, a-]` are not characterized.
    Overlapping,
}

/// A declared continuum edge lies on the wrong side of its `a` value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileIssue {
    UpperEdgeBelowAMinus { b_minus: f64, a_minus: f64 },
    LowerEdgeAboveAPlus { b_plus: f64, a_plus: f64 },
}

impl fmt::Display for ProfileIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileIssue::UpperEdgeBelowAMinus { b_minus, a_minus } => {
                write!(f, "declared b- = {b_minus} lies below a- = {a_minus}")
            }
            ProfileIssue::LowerEdgeAboveAPlus { b_plus, a_plus } => {
                write!(f, "declared b+ = {b_plus} lies above a+ = {a_plus}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    /// Largest eigenvalue of `amm`.
    pub a_minus: f64,
    /// Smallest eigenvalue of `app`.
    pub a_plus: f64,
    /// Declared upper continuum edge.
    pub b_minus: f64,
    /// Declared lower continuum edge.
    pub b_plus: f64,
    pub k0_plus: Option<usize>,
    pub k0_minus: Option<usize>,
}

fn finite_edge(b: f64) -> f64 {
    b.clamp(-UNBOUNDED_EDGE, UNBOUNDED_EDGE)
}

impl GapProfile {
    pub fn new(a_minus: f64, a_plus: f64, b_minus: f64, b_plus: f64) -> Self {
        Self {
            a_minus,
            a_plus,
            b_minus: finite_edge(b_minus),
            b_plus: finite_edge(b_plus),
            k0_plus: None,
            k0_minus: None,
        }
    }

    pub fn ordering(&self) -> GapOrdering {
        if self.a_minus < self.a_plus {
            GapOrdering::Separated
        } else {
            GapOrdering::Overlapping
        }
    }

    pub fn issues(&self) -> Vec<ProfileIssue> {
        let mut out = Vec::new();
        if self.a_minus > self.b_minus {
            out.push(ProfileIssue::UpperEdgeBelowAMinus {
                b_minus: self.b_minus,
                a_minus: self.a_minus,
            });
        }
        if self.b_plus > self.a_plus {
            out.push(ProfileIssue::LowerEdgeAboveAPlus {
                b_plus: self.b_plus,
                a_plus: self.a_plus,
            });
        }
        out
    }

    /// Profile of `negate_and_swap` of the same operator.
    pub fn mirrored(&self) -> Self {
        Self {
            a_minus: -self.a_plus,
            a_plus: -self.a_minus,
            b_minus: -self.b_plus,
            b_plus: -self.b_minus,
            k0_plus: self.k0_minus,
            k0_minus: self.k0_plus,
        }
    }

    /// The closed interval `[a+, a-]` where nothing is claimed, if non-empty.
    pub fn uncharacterized_interval(&self) -> Option<(f64, f64)> {
        (self.a_plus <= self.a_minus).then_some((self.a_plus, self.a_minus))
    }
}

/// Extreme Rayleigh quotients of the two diagonal blocks plus the declared edges.
pub fn gap_profile(op: &DecomposedOperator, b_minus: f64, b_plus: f64) -> Result<GapProfile> {
    let a_minus = linalg::symmetric_eigenvalue(op.amm(), op.n_minus() - 1);
    let a_plus = linalg::symmetric_eigenvalue(op.app(), 0);
    if !a_minus.is_finite() || !a_plus.is_finite() {
        return Err(GapError::Eigen("extreme block eigenvalue is not finite".into()));
    }
    Ok(GapProfile::new(a_minus, a_plus, b_minus, b_plus))
}

pub fn negate_and_swap(op: &DecomposedOperator) -> DecomposedOperator {
    op.negate_and_swap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> DecomposedOperator {
        DecomposedOperator::from_blocks(
            DMatrix::from_element(1, 1, 2.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, -2.0),
        )
        .unwrap()
    }

    #[test]
    fn builds_two_by_two() {
        let op = two_by_two();
        assert_eq!((op.n_plus(), op.n_minus()), (1, 1));
        assert_eq!(op.assemble(), DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, -2.0]));
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        let op = DecomposedOperator::from_blocks(
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 3),
            -DMatrix::identity(3, 3),
        )
        .unwrap();
        assert!(op.is_block_diagonal());
        assert_eq!(op.full_spectrum().unwrap(), vec![-1.0, -1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_non_hermitian_block() {
        let err = DecomposedOperator::from_blocks(
            DMatrix::identity(1, 1),
            DMatrix::zeros(1, 2),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        )
        .unwrap_err();
        match err {
            GapError::NonHermitian { block, asymmetry } => {
                assert_eq!(block, "amm");
                assert_eq!(asymmetry, 1.0);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let err = DecomposedOperator::from_blocks(
            DMatrix::identity(2, 2),
            DMatrix::zeros(1, 2),
            DMatrix::identity(2, 2),
        );
        assert!(matches!(err, Err(GapError::DimensionMismatch(_))));
        let err = DecomposedOperator::from_blocks(
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 0),
            DMatrix::zeros(0, 0),
        );
        assert!(matches!(err, Err(GapError::DimensionMismatch(_))));
    }

    #[test]
    fn symmetrizes_small_drift() {
        let app = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5 + 1e-14, 3.0]);
        let op =
            DecomposedOperator::from_blocks(app, DMatrix::zeros(2, 1), DMatrix::identity(1, 1)).unwrap();
        assert_eq!(op.app()[(0, 1)], op.app()[(1, 0)]);
    }

    #[test]
    fn profile_of_two_by_two() {
        let p = gap_profile(&two_by_two(), f64::INFINITY, f64::NEG_INFINITY).unwrap();
        assert_eq!(p.a_plus, 2.0);
        assert_eq!(p.a_minus, -2.0);
        assert_eq!(p.b_minus, UNBOUNDED_EDGE);
        assert_eq!(p.b_plus, -UNBOUNDED_EDGE);
        assert_eq!(p.ordering(), GapOrdering::Separated);
        assert!(p.issues().is_empty());
        assert_eq!(p.k0_plus, None);
    }

    #[test]
    fn profile_reports_inconsistent_edges() {
        let p = gap_profile(&two_by_two(), -3.0, 3.0).unwrap();
        assert_eq!(p.issues().len(), 2);
    }

    #[test]
    fn negate_and_swap_two_by_two() {
        let s = two_by_two().negate_and_swap();
        assert_eq!(s.app()[(0, 0)], 2.0);
        assert_eq!(s.amm()[(0, 0)], -2.0);
        assert_eq!(s.apm()[(0, 0)], -1.0);
        assert_eq!(s.negate_and_swap(), two_by_two());
    }

    #[test]
    fn matrix_text_round_trip() {
        let text = "1 2\n 2 0.5 0\n0.5 -1 0.25\n0 0.25 -3\n";
        let op = DecomposedOperator::parse_text(text).unwrap();
        assert_eq!((op.n_plus(), op.n_minus()), (1, 2));
        assert_eq!(op.apm()[(0, 0)], 0.5);
        let again = DecomposedOperator::parse_text(&op.to_text()).unwrap();
        assert_eq!(again.assemble(), op.assemble());
    }

    #[test]
    fn matrix_text_errors() {
        assert!(matches!(DecomposedOperator::parse_text("1 1\n1 2 3"), Err(GapError::Parse(_))));
        assert!(matches!(DecomposedOperator::parse_text("x 1"), Err(GapError::Parse(_))));
        assert!(matches!(
            DecomposedOperator::parse_text("1 1\n1 2 3 4"),
            Err(GapError::NonHermitian { .. })
        ));
        assert!(matches!(
            DecomposedOperator::parse_text("0 2\n1 0 0 1"),
            Err(GapError::DimensionMismatch(_))
        ));
    }
}
