use serde::{Deserialize, Serialize};

use super::{LevelResult, LevelStatus, Side};
use crate::error::Result;
use crate::operator::{DecomposedOperator, GapOrdering, GapProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMatch {
    pub side: Side,
    pub k: usize,
    pub value: f64,
    /// The window eigenvalue this level should equal, if the window has one at
    /// that position.
    pub eigenvalue: Option<f64>,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissedEigenvalue {
    pub side: Side,
    pub value: f64,
}

/// Comparison of computed levels with the full spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub tol: f64,
    pub ordering: GapOrdering,
    /// Interior levels equal to their window eigenvalue within `tol`.
    pub matched: Vec<LevelMatch>,
    /// Interior levels that are not.
    pub mismatched: Vec<LevelMatch>,
    /// Window eigenvalues that no level accounts for although the results
    /// reached the continuum edge.
    pub missed: Vec<MissedEigenvalue>,
    /// Eigenvalues in `[a+, a-]`, about which nothing is claimed.
    pub not_characterized: Vec<f64>,
}

impl SpectrumReport {
    pub fn is_consistent(&self) -> bool {
        self.mismatched.is_empty() && self.missed.is_empty()
    }
}

/// Plus-side comparison; the minus side is routed through negation.
fn check_side(
    spectrum: &[f64],
    profile: &GapProfile,
    results: &[&LevelResult],
    side: Side,
    tol: f64,
    report: &mut SpectrumReport,
) {
    let sign = side.sign();
    let (a, b) = match side {
        Side::Plus => (profile.a_minus, profile.b_minus),
        Side::Minus => (-profile.a_plus, -profile.b_plus),
    };
    let mut window: Vec<f64> =
        spectrum.iter().map(|&e| sign * e).filter(|&e| e > a && e < b).collect();
    window.sort_by(f64::total_cmp);

    let Some(k0) = results.iter().filter(|r| r.status != LevelStatus::ClampedAtA).map(|r| r.k).min()
    else {
        return;
    };
    let mut covered = 0;
    for r in results.iter().filter(|r| r.status == LevelStatus::Interior) {
        let idx = r.k - k0;
        let expected = window.get(idx).map(|&e| sign * e);
        let error = expected.map_or(f64::INFINITY, |e| (r.value - e).abs());
        let m = LevelMatch {
            side,
            k: r.k,
            value: r.value,
            eigenvalue: expected,
            error,
        };
        covered = covered.max(idx + 1);
        if error <= tol {
            report.matched.push(m);
        } else {
            report.mismatched.push(m);
        }
    }
    if results.iter().any(|r| r.status == LevelStatus::ClampedAtB) {
        for &e in window.iter().skip(covered) {
            report.missed.push(MissedEigenvalue { side, value: sign * e });
        }
    }
}

/// Check `results` against a given spectrum (with multiplicity, any order).
pub fn spectrum_check_against(
    spectrum: &[f64],
    profile: &GapProfile,
    results: &[LevelResult],
    tol: f64,
) -> SpectrumReport {
    let mut report = SpectrumReport {
        tol,
        ordering: profile.ordering(),
        matched: Vec::new(),
        mismatched: Vec::new(),
        missed: Vec::new(),
        not_characterized: Vec::new(),
    };
    for side in [Side::Plus, Side::Minus] {
        let mut own: Vec<&LevelResult> = results.iter().filter(|r| r.side == side).collect();
        own.sort_by_key(|r| r.k);
        check_side(spectrum, profile, &own, side, tol, &mut report);
    }
    if let Some((lo, hi)) = profile.uncharacterized_interval() {
        report.not_characterized = spectrum
            .iter()
            .copied()
            .filter(|&e| e >= lo - tol && e <= hi + tol)
            .collect();
        report.not_characterized.sort_by(f64::total_cmp);
    }
    report
}

/// Diagonalize `op` fully and compare. Interior plus-side level `k` must equal
/// the `(k - k0 + 1)`-th eigenvalue in `(a-, b-)`; minus-side levels count
/// down from `a+` in `(b+, a+)`.
pub fn spectrum_check(
    op: &DecomposedOperator,
    profile: &GapProfile,
    results: &[LevelResult],
    tol: f64,
) -> Result<SpectrumReport> {
    let spectrum = op.full_spectrum()?;
    Ok(spectrum_check_against(&spectrum, profile, results, tol))
}

/// Expand per-channel spectra by their multiplicities.
pub fn merged_spectrum(channels: &[(Vec<f64>, usize)]) -> Vec<f64> {
    let mut out: Vec<f64> = channels
        .iter()
        .flat_map(|(eigs, m)| eigs.iter().flat_map(move |&e| std::iter::repeat_n(e, *m)))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}
