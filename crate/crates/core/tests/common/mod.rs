//! Random instances and property checks shared by the acceptance run and the
//! property tests.

#![allow(dead_code)]

use gapspec::solver::level_objective;
use gapspec::{gap_profile, solve_level, DecomposedOperator, GapProfile, LevelStatus, Side};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0) * scale);
    (&m + m.transpose()) * 0.5
}

fn max_eig(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().max()
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// A random symmetric operator of dimension at most 16.
///
/// With `separated`, the diagonal blocks are shifted apart so that
/// `a- < a+`. Every fifth instance is a direct sum of a smaller instance with
/// itself, so that every eigenvalue is repeated.
pub fn random_instance(seed: u64, separated: bool) -> DecomposedOperator {
    let mut r = rng(seed);
    let doubled = seed % 5 == 4;
    let cap = if doubled { 4 } else { 8 };
    let np = r.random_range(1..=cap);
    let nm = r.random_range(1..=cap);
    let mut app = random_symmetric(&mut r, np, 2.0);
    let amm = random_symmetric(&mut r, nm, 2.0);
    let coupling = r.random_range(0.1..2.0);
    let apm = DMatrix::from_fn(np, nm, |_, _| r.random_range(-1.0..1.0) * coupling);
    if separated {
        let gap = min_eig(&app) - max_eig(&amm);
        let want = r.random_range(0.05..1.5);
        if gap < want {
            app += DMatrix::identity(np, np) * (want - gap);
        }
    }
    if !doubled {
        return DecomposedOperator::from_blocks(app, apm, amm).unwrap();
    }
    let twice = |m: &DMatrix<f64>| {
        let (a, b) = m.shape();
        let mut out = DMatrix::zeros(2 * a, 2 * b);
        out.view_mut((0, 0), (a, b)).copy_from(m);
        out.view_mut((a, b), (a, b)).copy_from(m);
        out
    };
    DecomposedOperator::from_blocks(twice(&app), twice(&apm), twice(&amm)).unwrap()
}

pub fn open_profile(op: &DecomposedOperator) -> GapProfile {
    gap_profile(op, f64::INFINITY, f64::NEG_INFINITY).unwrap()
}

/// Every level on both sides, matched against the full spectrum. Returns the
/// number of interior levels checked.
pub fn check_theorem(op: &DecomposedOperator, tol: f64) -> Result<usize, String> {
    let mut profile = open_profile(op);
    let mut levels = gapspec::solve_levels(op, &mut profile, op.n_plus(), Side::Plus, 1e-13)
        .map_err(|e| e.to_string())?;
    levels.extend(
        gapspec::solve_levels(op, &mut profile, op.n_minus(), Side::Minus, 1e-13).map_err(|e| e.to_string())?,
    );
    let spectrum = op.full_spectrum().map_err(|e| e.to_string())?;
    let report = gapspec::solver::spectrum_check_against(&spectrum, &profile, &levels, tol);
    if !report.is_consistent() {
        return Err(format!("mismatched {:?}, missed {:?}", report.mismatched, report.missed));
    }
    // at most n+ eigenvalues lie above a-, so all of them must be matched
    let above = spectrum.iter().filter(|&&e| e > profile.a_minus).count();
    let below = spectrum.iter().filter(|&&e| e < profile.a_plus).count();
    let interior = |s: Side| levels.iter().filter(|l| l.side == s && l.status == LevelStatus::Interior).count();
    if interior(Side::Plus) != above || interior(Side::Minus) != below {
        return Err(format!(
            "interior counts ({}, {}) differ from eigenvalue counts ({above}, {below})",
            interior(Side::Plus),
            interior(Side::Minus)
        ));
    }
    Ok(report.matched.len())
}

/// `f_k` strictly decreases on `pairs` random pairs above `a-`.
pub fn check_monotone(op: &DecomposedOperator, k: usize, pairs: usize, seed: u64) -> Result<(), String> {
    let a = open_profile(op).a_minus;
    let mut r = rng(seed);
    for _ in 0..pairs {
        let x = a + r.random_range(1e-6..10.0);
        let y = x + r.random_range(1e-6..5.0);
        let fx = level_objective(op, k, x).map_err(|e| e.to_string())?;
        let fy = level_objective(op, k, y).map_err(|e| e.to_string())?;
        // slope is at most -1
        if (fx - fy).is_nan() || fx - fy < (y - x) * (1.0 - 1e-9) {
            return Err(format!("f_{k}({x}) = {fx}, f_{k}({y}) = {fy}"));
        }
    }
    Ok(())
}

/// Levels are monotone in `k` and respect `lambda_k^+ >= max(a-, a+)`,
/// `lambda_k^- <= min(a-, a+)`.
pub fn check_order_and_bounds(op: &DecomposedOperator) -> Result<(), String> {
    let p = open_profile(op);
    for side in [Side::Plus, Side::Minus] {
        let n = match side {
            Side::Plus => op.n_plus(),
            Side::Minus => op.n_minus(),
        };
        let levels: Vec<f64> =
            (1..=n).map(|k| solve_level(op, &p, k, side, 1e-12).map(|l| l.value)).collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
        let s = side.sign();
        if levels.windows(2).any(|w| s * (w[1] - w[0]) < -1e-10) {
            return Err(format!("{side} levels not ordered: {levels:?}"));
        }
        let edge = s * (s * p.a_minus).max(s * p.a_plus);
        if levels.iter().any(|&l| s * (l - edge) < -1e-10) {
            return Err(format!("{side} levels {levels:?} beyond bound {edge}"));
        }
    }
    Ok(())
}

/// Minus side equals the negated plus side of `negate_and_swap`.
pub fn check_duality(op: &DecomposedOperator) -> Result<(), String> {
    let p = open_profile(op);
    let dual = gapspec::negate_and_swap(op);
    let pd = open_profile(&dual);
    for k in 1..=op.n_minus() {
        let minus = solve_level(op, &p, k, Side::Minus, 1e-12).map_err(|e| e.to_string())?;
        let plus = solve_level(&dual, &pd, k, Side::Plus, 1e-12).map_err(|e| e.to_string())?;
        if (minus.value + plus.value).abs() > 1e-12 || minus.status != plus.status {
            return Err(format!("k={k}: {} vs -{}", minus.value, plus.value));
        }
    }
    Ok(())
}

/// Adding `c` to the operator adds `c` to every level.
pub fn check_shift(op: &DecomposedOperator, c: f64) -> Result<(), String> {
    let p = open_profile(op);
    let shifted = op.shifted(c);
    let ps = open_profile(&shifted);
    for side in [Side::Plus, Side::Minus] {
        let n = match side {
            Side::Plus => op.n_plus(),
            Side::Minus => op.n_minus(),
        };
        for k in 1..=n {
            let a = solve_level(op, &p, k, side, 1e-13).map_err(|e| e.to_string())?;
            let b = solve_level(&shifted, &ps, k, side, 1e-13).map_err(|e| e.to_string())?;
            let scale = 1.0 + a.value.abs().max(c.abs());
            if (b.value - a.value - c).abs() > 1e-10 * scale {
                return Err(format!("{side} k={k}: {} + {c} != {}", a.value, b.value));
            }
        }
    }
    Ok(())
}

/// Observed convergence order of the Pauli ground level (`nu = 1`, `l = 0`)
/// from two grids, the second with half the spacing.
pub fn pauli_observed_order(r_max: f64, n: usize) -> f64 {
    use gapspec::discretization::{build_pauli_channel, RadialGrid};
    let exact = 0.75;
    let mut grid = RadialGrid::new(r_max, n).unwrap();
    let mut errors = Vec::new();
    for _ in 0..2 {
        let op = build_pauli_channel(1.0, 0, &grid).unwrap();
        let p = gap_profile(&op, 1.0, -1.0).unwrap();
        let level = solve_level(&op, &p, 1, Side::Plus, 1e-14).unwrap();
        errors.push((level.value - exact).abs());
        grid = grid.refined();
    }
    (errors[0] / errors[1]).log2()
}
