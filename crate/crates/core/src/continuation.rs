//! Branches `tau -> lambda_k^{tau,+-}` of the family `A_tau = A_0 + tau V` and
//! numerical checks of the hypotheses of the continuation principle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::operator::{gap_profile, DecomposedOperator, GapProfile};
use crate::solver::{solve_level, LevelResult, LevelStatus, Side, DEFAULT_PDE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Strictly increasing, starting at 0.
    pub tau_values: Vec<f64>,
    pub k_set: Vec<(Side, usize)>,
    /// Upper bound on `|V|`, used for the Lipschitz check.
    pub v_sup: f64,
    pub tol: f64,
    /// Diagonalize every `A_tau` to estimate `a_1^+-`.
    pub dense_diagnostics: bool,
}

impl SweepConfig {
    pub fn new(tau_values: Vec<f64>, k_set: Vec<(Side, usize)>, v_sup: f64) -> Self {
        Self {
            tau_values,
            k_set,
            v_sup,
            tol: DEFAULT_PDE_TOL,
            dense_diagnostics: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let taus = &self.tau_values;
        if taus.first() != Some(&0.0) {
            return Err(GapError::Config("tau values must start at 0".into()));
        }
        if taus.iter().any(|t| !t.is_finite()) || taus.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GapError::Config("tau values must be finite and strictly increasing".into()));
        }
        if self.k_set.is_empty() || self.k_set.iter().any(|&(_, k)| k == 0) {
            return Err(GapError::Config("k set must be non-empty with k >= 1".into()));
        }
        if !(self.v_sup.is_finite() && self.v_sup >= 0.0) {
            return Err(GapError::Config(format!("v_sup must be finite and >= 0, got {}", self.v_sup)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(GapError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// `n + 1` equally spaced values `0, tau_max/n, ..., tau_max`.
pub fn tau_grid(tau_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| tau_max * i as f64 / n as f64).collect()
}

/// Diagnostics of `A_tau` at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisPoint {
    pub tau: f64,
    /// Largest eigenvalue of `amm(tau)`.
    pub a_minus: f64,
    /// Smallest eigenvalue of `app(tau)`.
    pub a_plus: f64,
    /// `a_minus(tau) <= a-` of the declared profile.
    pub jj_minus: bool,
    /// `a_plus(tau) >= a+` of the declared profile.
    pub jj_plus: bool,
    /// Smallest eigenvalue of `A_tau` above the declared `a-`.
    pub lowest_above_a_minus: Option<f64>,
    /// Largest eigenvalue of `A_tau` below the declared `a+`.
    pub highest_below_a_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub tau: f64,
    pub level: LevelResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub side: Side,
    pub k: usize,
    pub points: Vec<BranchPoint>,
    pub hypothesis_report: Vec<HypothesisPoint>,
}

fn hypothesis_point(
    tau: f64,
    op: &DecomposedOperator,
    local: &GapProfile,
    declared: &GapProfile,
    dense: bool,
) -> Result<HypothesisPoint> {
    let (mut above, mut below) = (None, None);
    if dense {
        let spectrum = op.full_spectrum()?;
        above = spectrum.iter().copied().find(|&e| e > declared.a_minus);
        below = spectrum.iter().rev().copied().find(|&e| e < declared.a_plus);
    }
    Ok(HypothesisPoint {
        tau,
        a_minus: local.a_minus,
        a_plus: local.a_plus,
        jj_minus: local.a_minus <= declared.a_minus,
        jj_plus: local.a_plus >= declared.a_plus,
        lowest_above_a_minus: above,
        highest_below_a_plus: below,
    })
}

/// Solve every `(side, k)` of `config` on `A_0 + tau V` for each `tau`.
///
/// Each point uses the profile of `A_tau` itself together with the declared
/// edges `b+-` of `profile`; the hypothesis report compares the per-point
/// `a+-(tau)` with the declared `a+-`. Errors carry the offending `tau`.
pub fn sweep(
    op0: &DecomposedOperator,
    perturbation: &DecomposedOperator,
    config: &SweepConfig,
    profile: &GapProfile,
) -> Result<Vec<Branch>> {
    config.validate()?;
    let per_tau = config
        .tau_values
        .par_iter()
        .map(|&tau| {
            let at = |e: GapError| GapError::AtTau { tau, source: Box::new(e) };
            let op = op0.add_scaled(tau, perturbation).map_err(at)?;
            let local = gap_profile(&op, profile.b_minus, profile.b_plus).map_err(at)?;
            let hyp = hypothesis_point(tau, &op, &local, profile, config.dense_diagnostics).map_err(at)?;
            let levels = config
                .k_set
                .iter()
                .map(|&(side, k)| solve_level(&op, &local, k, side, config.tol))
                .collect::<Result<Vec<_>>>()
                .map_err(at)?;
            Ok((hyp, levels))
        })
        .collect::<Result<Vec<_>>>()?;

    let report: Vec<HypothesisPoint> = per_tau.iter().map(|(h, _)| h.clone()).collect();
    Ok(config
        .k_set
        .iter()
        .enumerate()
        .map(|(i, &(side, k))| Branch {
            side,
            k,
            points: per_tau
                .iter()
                .map(|(h, levels)| BranchPoint { tau: h.tau, level: levels[i].clone() })
                .collect(),
            hypothesis_report: report.clone(),
        })
        .collect())
}

/// The smallest profile valid for every sweep point: `sup a-(tau)` and
/// `inf a+(tau)`, with the given edges.
pub fn uniform_profile(points: &[HypothesisPoint], b_minus: f64, b_plus: f64) -> GapProfile {
    let a_minus = points.iter().map(|h| h.a_minus).fold(f64::NEG_INFINITY, f64::max);
    let a_plus = points.iter().map(|h| h.a_plus).fold(f64::INFINITY, f64::min);
    GapProfile::new(a_minus, a_plus, b_minus, b_plus)
}

/// Findings for one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFindings {
    pub side: Side,
    pub k: usize,
    /// The level is interior or at the edge at `tau = 0`.
    pub starts_in_window: bool,
    /// Once interior, the branch never falls back to `clamped_at_a`.
    pub dichotomy_holds: bool,
    /// Statuses change monotonically along the sweep.
    pub monotone_statuses: bool,
    /// `tau` values (right end of a step) where `|dlambda| > v_sup dtau + 2 tol`.
    pub lipschitz_violations: Vec<f64>,
    /// Consecutive `tau` values between which the status changes.
    pub status_changes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBoundsReport {
    pub declared_a_minus: f64,
    pub declared_a_plus: f64,
    pub sup_a_minus: f64,
    pub inf_a_plus: f64,
    pub jj_minus_holds: bool,
    pub jj_plus_holds: bool,
    /// `tau` values where `a-(tau)` exceeds the declared `a-`.
    pub jj_minus_violations: Vec<f64>,
    pub jj_plus_violations: Vec<f64>,
    /// `min_tau` of the smallest eigenvalue above `a-`; `None` without dense
    /// diagnostics or when no such eigenvalue exists.
    pub a1_minus: Option<f64>,
    /// `max_tau` of the largest eigenvalue below `a+`.
    pub a1_plus: Option<f64>,
    pub a1_minus_above_a_minus: bool,
    pub a1_plus_below_a_plus: bool,
    pub branches: Vec<BranchFindings>,
}

impl UniformBoundsReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.jj_minus_holds && self.jj_plus_holds && self.a1_minus_above_a_minus && self.a1_plus_below_a_plus
    }

    pub fn conclusions_hold(&self) -> bool {
        self.branches
            .iter()
            .all(|b| b.dichotomy_holds && b.monotone_statuses && b.lipschitz_violations.is_empty())
    }
}

fn branch_findings(branch: &Branch, config: &SweepConfig) -> BranchFindings {
    let pts = &branch.points;
    let starts_in_window = pts.first().is_some_and(|p| p.level.status != LevelStatus::ClampedAtA);
    let mut seen_interior = false;
    let mut dichotomy_holds = true;
    for p in pts {
        match p.level.status {
            LevelStatus::Interior => seen_interior = true,
            LevelStatus::ClampedAtA if seen_interior => dichotomy_holds = false,
            _ => {}
        }
    }
    let statuses: Vec<LevelStatus> = pts.iter().map(|p| p.level.status).collect();
    let monotone_statuses =
        statuses.windows(2).all(|w| w[0] <= w[1]) || statuses.windows(2).all(|w| w[0] >= w[1]);
    let mut lipschitz_violations = Vec::new();
    let mut status_changes = Vec::new();
    for w in pts.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        if p.level.status != q.level.status {
            status_changes.push((p.tau, q.tau));
        }
        if p.level.status == LevelStatus::Interior && q.level.status == LevelStatus::Interior {
            let bound = config.v_sup * (q.tau - p.tau) + 2.0 * config.tol;
            if (q.level.value - p.level.value).abs() > bound {
                lipschitz_violations.push(q.tau);
            }
        }
    }
    BranchFindings {
        side: branch.side,
        k: branch.k,
        starts_in_window,
        dichotomy_holds,
        monotone_statuses,
        lipschitz_violations,
        status_changes,
    }
}

/// Check the uniform bounds against the declared `a+-` of `profile`, estimate
/// `a_1^+-`, and examine every branch for the continuation dichotomy.
pub fn verify_uniform_bounds(
    branches: &[Branch],
    profile: &GapProfile,
    config: &SweepConfig,
) -> UniformBoundsReport {
    let hyp: &[HypothesisPoint] = branches.first().map_or(&[], |b| &b.hypothesis_report);
    let uniform = uniform_profile(hyp, profile.b_minus, profile.b_plus);
    let jj_minus_violations: Vec<f64> = hyp.iter().filter(|h| !h.jj_minus).map(|h| h.tau).collect();
    let jj_plus_violations: Vec<f64> = hyp.iter().filter(|h| !h.jj_plus).map(|h| h.tau).collect();
    let a1_minus = hyp.iter().filter_map(|h| h.lowest_above_a_minus).reduce(f64::min);
    let a1_plus = hyp.iter().filter_map(|h| h.highest_below_a_plus).reduce(f64::max);
    let margin = config.tol;
    UniformBoundsReport {
        declared_a_minus: profile.a_minus,
        declared_a_plus: profile.a_plus,
        sup_a_minus: uniform.a_minus,
        inf_a_plus: uniform.a_plus,
        jj_minus_holds: jj_minus_violations.is_empty(),
        jj_plus_holds: jj_plus_violations.is_empty(),
        jj_minus_violations,
        jj_plus_violations,
        a1_minus,
        a1_plus,
        a1_minus_above_a_minus: a1_minus.is_none_or(|a1| a1 > profile.a_minus + margin),
        a1_plus_below_a_plus: a1_plus.is_none_or(|a1| a1 < profile.a_plus - margin),
        branches: branches.iter().map(|b| branch_findings(b, config)).collect(),
    }
}
