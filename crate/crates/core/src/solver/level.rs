use rayon::prelude::*;

use super::schur::SchurEvaluator;
use super::{LevelResult, LevelStatus, Side};
use crate::error::{GapError, Result};
use crate::operator::{DecomposedOperator, GapProfile};

/// Cap on objective evaluations per level.
pub const MAX_ITERATIONS: usize = 200;
/// Default absolute tolerance on `f_k` for matrix inputs.
pub const DEFAULT_MATRIX_TOL: f64 = 1e-10;
/// Default absolute tolerance on `f_k` for discretized channels.
pub const DEFAULT_PDE_TOL: f64 = 1e-8;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(GapError::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Root of `f_k` on `(a- + eps, b-]` for the plus side of the evaluator's
/// operator. `side` only labels the result and errors.
///
/// `f_k` decreases with slope at most `-1`, so every evaluation encloses the
/// root: `f(x) > 0` puts it in `(x, x + f(x)]`, `f(x) < 0` in `[x + f(x), x)`.
/// The search starts at `b-`, takes the step `x + f(x)` until two points are
/// known, then secant steps; any step leaving the enclosure, or three steps
/// that fail to halve it, are replaced by bisection. `f_k` at `a- + eps` is
/// only evaluated when the enclosure does not already exclude it. When the
/// enclosure shrinks to a few ulps before `|f_k| <= tol`, the tolerance is
/// below the rounding level of `f_k` and the best point found is returned.
fn solve_plus(
    ev: &SchurEvaluator<'_>,
    profile: &GapProfile,
    k: usize,
    side: Side,
    tol: f64,
) -> Result<LevelResult> {
    let a = profile.a_minus.max(ev.a_minus());
    let b = profile.b_minus;
    let lo = a + 1e-9 * (1.0 + a.abs());
    if lo >= b {
        return Err(GapError::Precondition(format!(
            "empty window: a- = {a} is not below b- = {b}"
        )));
    }
    let mut evals = 0usize;
    let result = |value, status, residual: f64, iterations| LevelResult {
        side,
        k,
        value,
        status,
        residual: residual.abs(),
        iterations,
    };

    evals += 1;
    let f_b = ev.objective(k, b)?;
    if f_b >= 0.0 {
        return Ok(result(b, LevelStatus::ClampedAtB, f_b, evals));
    }
    let (mut enc_lo, mut enc_hi) = (lo, b);
    let mut lo_excluded = false;
    let mut last = (b, f_b);
    let mut before_last: Option<(f64, f64)> = None;
    let mut widths = vec![enc_hi - enc_lo];
    let mut best = last;

    let mut pending = Some(b + f_b);
    loop {
        // clamped unless some point certifies a root above a- + eps
        if !lo_excluded && pending.is_some_and(|x| x <= lo) {
            evals += 1;
            let f_lo = ev.objective(k, lo)?;
            if f_lo <= 0.0 {
                return Ok(result(profile.a_minus, LevelStatus::ClampedAtA, f_lo, evals));
            }
            lo_excluded = true;
            enc_hi = enc_hi.min(lo + f_lo);
            before_last = Some(last);
            last = (lo, f_lo);
            pending = None;
        }
        let n = widths.len();
        let stalled = n > 3 && widths[n - 1] > 0.5 * widths[n - 4];
        let inside = |x: f64| x > enc_lo && x < enc_hi;
        let mut x = 0.5 * (enc_lo + enc_hi);
        if !stalled {
            let secant = before_last.map(|(x0, f0)| last.0 - last.1 * (last.0 - x0) / (last.1 - f0));
            if let Some(c) = pending.take().or(secant).filter(|&c| inside(c)) {
                x = c;
            } else if inside(last.0 + last.1) {
                x = last.0 + last.1;
            }
        }
        let collapsed = enc_hi - enc_lo <= 4.0 * f64::EPSILON * enc_hi.abs().max(enc_lo.abs());
        if collapsed && lo_excluded {
            return Ok(result(best.0, LevelStatus::Interior, best.1, evals));
        }
        if evals >= MAX_ITERATIONS || collapsed {
            return Err(GapError::NonConvergence {
                side,
                k,
                iterations: evals,
                lo: enc_lo,
                hi: enc_hi,
            });
        }
        evals += 1;
        let fx = ev.objective(k, x)?;
        if fx.abs() <= tol && (lo_excluded || fx > 0.0 || x + fx > lo) {
            return Ok(result(x, LevelStatus::Interior, fx, evals));
        }
        if fx > 0.0 {
            lo_excluded = true;
            enc_lo = enc_lo.max(x);
            enc_hi = enc_hi.min(x + fx);
        } else {
            enc_hi = enc_hi.min(x);
            enc_lo = enc_lo.max(x + fx);
            if x + fx > lo {
                lo_excluded = true;
            } else if !lo_excluded {
                pending = Some(x + fx);
            }
        }
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        before_last = Some(last);
        last = (x, fx);
        widths.push(enc_hi - enc_lo);
    }
}

/// `lambda_k^+` or `lambda_k^-` of `op` (`k` is 1-based).
///
/// Plus side: if `f_k(a- + eps) <= 0` the level is reported `clamped_at_a` with
/// value `a-`; if `f_k(b-) >= 0` it is `clamped_at_b` with value `b-`; otherwise
/// the root is refined until `|f_k| <= tol`, which also encloses it within
/// `tol`. The minus side is solved as the plus side of `negate_and_swap(op)`.
pub fn solve_level(
    op: &DecomposedOperator,
    profile: &GapProfile,
    k: usize,
    side: Side,
    tol: f64,
) -> Result<LevelResult> {
    check_tol(tol)?;
    match side {
        Side::Plus => solve_plus(&SchurEvaluator::new(op)?, profile, k, side, tol),
        Side::Minus => {
            let neg = op.negate_and_swap();
            let mut r = solve_plus(&SchurEvaluator::new(&neg)?, &profile.mirrored(), k, side, tol)?;
            r.value = -r.value;
            Ok(r)
        }
    }
}

/// Levels `k = 1..=count` on one side. Records the first index that is not
/// `clamped_at_a` as `k0` in `profile` and checks that the levels are ordered
/// (nondecreasing in `k` on the plus side, nonincreasing on the minus side).
pub fn solve_levels(
    op: &DecomposedOperator,
    profile: &mut GapProfile,
    count: usize,
    side: Side,
    tol: f64,
) -> Result<Vec<LevelResult>> {
    check_tol(tol)?;
    let negated;
    let (target, plus_profile) = match side {
        Side::Plus => (op, profile.clone()),
        Side::Minus => {
            negated = op.negate_and_swap();
            (&negated, profile.mirrored())
        }
    };
    let max = target.n_plus();
    if count == 0 || count > max {
        return Err(GapError::IndexOutOfRange { k: count, max });
    }
    let ev = SchurEvaluator::new(target)?;
    let mut levels = (1..=count)
        .into_par_iter()
        .map(|k| solve_plus(&ev, &plus_profile, k, side, tol))
        .collect::<Result<Vec<_>>>()?;
    if side == Side::Minus {
        for r in &mut levels {
            r.value = -r.value;
        }
    }
    for w in levels.windows(2) {
        let step = side.sign() * (w[1].value - w[0].value);
        if step < -(2.0 * tol + 1e-12 * w[0].value.abs()) {
            return Err(GapError::InvariantViolation(format!(
                "{side} levels out of order: k={} gives {}, k={} gives {}",
                w[0].k, w[0].value, w[1].k, w[1].value
            )));
        }
    }
    let k0 = levels.iter().find(|r| r.status != LevelStatus::ClampedAtA).map(|r| r.k);
    match side {
        Side::Plus => profile.k0_plus = k0,
        Side::Minus => profile.k0_minus = k0,
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::operator::gap_profile;

    fn two_by_two() -> (DecomposedOperator, GapProfile) {
        let op =
            DecomposedOperator::from_full(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, -2.0]), 1).unwrap();
        let p = gap_profile(&op, f64::INFINITY, f64::NEG_INFINITY).unwrap();
        (op, p)
    }

    #[test]
    fn closed_form_both_sides() {
        let (op, p) = two_by_two();
        let plus = solve_level(&op, &p, 1, Side::Plus, 1e-12).unwrap();
        assert_eq!(plus.status, LevelStatus::Interior);
        assert!((plus.value - 5f64.sqrt()).abs() < 1e-12);
        assert!(plus.residual <= 1e-12);
        let minus = solve_level(&op, &p, 1, Side::Minus, 1e-12).unwrap();
        assert_eq!(minus.side, Side::Minus);
        assert!((minus.value + 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn clamps_at_both_ends() {
        // app = 0.5 below a- = 1: clamped at a
        let op = DecomposedOperator::from_blocks(
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::zeros(1, 1),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        let p = gap_profile(&op, 5.0, -5.0).unwrap();
        let r = solve_level(&op, &p, 1, Side::Plus, 1e-10).unwrap();
        assert_eq!((r.status, r.value), (LevelStatus::ClampedAtA, 1.0));
        // app = 3 above b- = 2: clamped at b
        let op = DecomposedOperator::from_blocks(
            DMatrix::from_element(1, 1, 3.0),
            DMatrix::zeros(1, 1),
            DMatrix::from_element(1, 1, -1.0),
        )
        .unwrap();
        let p = gap_profile(&op, 2.0, -2.0).unwrap();
        let r = solve_level(&op, &p, 1, Side::Plus, 1e-10).unwrap();
        assert_eq!((r.status, r.value), (LevelStatus::ClampedAtB, 2.0));
    }

    #[test]
    fn batch_fills_k0() {
        let full = DMatrix::from_row_slice(
            3,
            3,
            &[
                -3.0, 0.0, 0.0, //
                0.0, 1.0, 0.1, //
                0.0, 0.1, -1.0,
            ],
        );
        let op = DecomposedOperator::from_full(&full, 2).unwrap();
        let mut p = gap_profile(&op, 10.0, -10.0).unwrap();
        let levels = solve_levels(&op, &mut p, 2, Side::Plus, 1e-12).unwrap();
        assert_eq!(levels[0].status, LevelStatus::ClampedAtA);
        assert_eq!(levels[1].status, LevelStatus::Interior);
        assert_eq!(p.k0_plus, Some(2));
        assert!(solve_levels(&op, &mut p, 3, Side::Plus, 1e-12).is_err());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let (op, p) = two_by_two();
        assert!(solve_level(&op, &p, 1, Side::Plus, 0.0).is_err());
        assert!(solve_level(&op, &p, 1, Side::Plus, f64::NAN).is_err());
    }
}
