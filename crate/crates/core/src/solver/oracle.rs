//! Direct evaluation of the inf-sup for small matrices, independent of the
//! Schur-complement reduction.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Side;
use crate::error::{GapError, Result};
use crate::operator::DecomposedOperator;

/// Largest total dimension accepted.
pub const ORACLE_MAX_DIM: usize = 16;
/// Upper bound on random starts.
pub const ORACLE_RESTARTS: usize = 64;
/// Starts stop early once this many reach the best value found.
const AGREEING_STARTS: usize = 3;
const MIN_STARTS: usize = 4;
const DEFAULT_SEED: u64 = 0x0067_6170_7370_6563;
const MAX_SWEEPS: usize = 400;
const GRID: usize = 8;
const GRADIENT_ITERATIONS: usize = 2000;

/// Largest eigenvalue of the compression of `A` to `span(Y) (+) H-`.
fn compressed_max(op: &DecomposedOperator, y: &DMatrix<f64>) -> f64 {
    let k = y.ncols();
    let nm = op.n_minus();
    let mut c = DMatrix::zeros(k + nm, k + nm);
    let top = y.transpose() * op.app() * y;
    let cross = y.transpose() * op.apm();
    c.view_mut((0, 0), (k, k)).copy_from(&top);
    c.view_mut((0, k), (k, nm)).copy_from(&cross);
    c.view_mut((k, 0), (nm, k)).copy_from(&cross.transpose());
    c.view_mut((k, k), (nm, nm)).copy_from(op.amm());
    c.symmetric_eigenvalues().max()
}

fn rotate(q: &mut DMatrix<f64>, i: usize, j: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    for r in 0..q.nrows() {
        let (a, b) = (q[(r, i)], q[(r, j)]);
        q[(r, i)] = c * a + s * b;
        q[(r, j)] = -s * a + c * b;
    }
}

/// Brent's minimization on `[lo, hi]` starting from `x` with value `fx`.
fn brent(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, x: f64, fx: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    const TOL: f64 = 1e-9;
    let (mut x, mut w, mut v) = (x, x, x);
    let (mut fx, mut fw, mut fv) = (fx, fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let xm = 0.5 * (lo + hi);
        let tol1 = TOL * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            (v, w, x) = (w, x, u);
            (fv, fw, fx) = (fw, fx, fu);
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                (v, w) = (w, u);
                (fv, fw) = (fw, fu);
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// One local minimization from the orthonormal basis `q` of `H+`; the frame is
/// its first `k` columns.
fn descend(op: &DecomposedOperator, k: usize, mut q: DMatrix<f64>) -> f64 {
    let n = q.nrows();
    let frame = |q: &DMatrix<f64>| q.columns(0, k).into_owned();
    let mut best = compressed_max(op, &frame(&q));
    let step = std::f64::consts::PI / GRID as f64;
    for _ in 0..MAX_SWEEPS {
        let start = best;
        for i in 0..k {
            for j in k..n {
                let eval = |theta: f64| {
                    let mut trial = q.clone();
                    rotate(&mut trial, i, j, theta);
                    compressed_max(op, &frame(&trial))
                };
                // coarse scan of one period, then refine around the best sample
                let (mut t0, mut f0) = (0.0, best);
                for g in 1..GRID {
                    let t = -std::f64::consts::FRAC_PI_2 + g as f64 * step;
                    let ft = eval(t);
                    if ft < f0 {
                        (t0, f0) = (t, ft);
                    }
                }
                let (t, ft) = brent(eval, t0 - step, t0 + step, t0, f0);
                if ft < best {
                    rotate(&mut q, i, j, t);
                    best = ft;
                }
            }
        }
        if start - best <= 1e-13 * (1.0 + best.abs()) {
            break;
        }
    }
    best
}

/// Largest eigenvalue of the compression and the gradient of that value with
/// respect to the frame `y`, projected onto the tangent space.
fn value_and_gradient(op: &DecomposedOperator, y: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let k = y.ncols();
    let nm = op.n_minus();
    let mut c = DMatrix::zeros(k + nm, k + nm);
    let ay = op.app() * y;
    let top = y.transpose() * &ay;
    let cross = y.transpose() * op.apm();
    c.view_mut((0, 0), (k, k)).copy_from(&top);
    c.view_mut((0, k), (k, nm)).copy_from(&cross);
    c.view_mut((k, 0), (nm, k)).copy_from(&cross.transpose());
    c.view_mut((k, k), (nm, nm)).copy_from(op.amm());
    let eig = c.symmetric_eigen();
    let (imax, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty compression");
    let u = eig.eigenvectors.column(imax);
    let (u1, u2) = (u.rows(0, k), u.rows(k, nm));
    let g = (ay * u1 + op.apm() * u2) * u1.transpose() * 2.0;
    let tangent = &g - y * (y.transpose() * &g);
    (value, tangent)
}

/// Gradient descent over `k`-frames with Barzilai-Borwein steps and an
/// Armijo safeguard. Fast where the top eigenvalue is simple; the plane
/// rotations of [`descend`] finish the job where it is not.
fn gradient_phase(op: &DecomposedOperator, mut y: DMatrix<f64>) -> DMatrix<f64> {
    let (mut f, mut g) = value_and_gradient(op, &y);
    let mut step = 0.1;
    for _ in 0..GRADIENT_ITERATIONS {
        let gg = g.norm_squared();
        if gg.sqrt() <= 1e-12 * (1.0 + f.abs()) {
            break;
        }
        let mut s = step;
        let accepted = loop {
            let trial = (&y - &g * s).qr().q();
            let (ft, gt) = value_and_gradient(op, &trial);
            if ft <= f - 1e-4 * s * gg {
                break Some((trial, ft, gt));
            }
            s *= 0.5;
            if s < 1e-14 {
                break None;
            }
        };
        let Some((trial, ft, gt)) = accepted else {
            break;
        };
        let dy = &trial - &y;
        let dg = &gt - &g;
        let curvature = dy.dot(&dg);
        step = if curvature > 0.0 { (dy.norm_squared() / curvature).clamp(1e-6, 1e3) } else { 2.0 * s };
        (y, f, g) = (trial, ft, gt);
    }
    y
}

/// Orthonormal basis of the whole space whose first columns span `y`.
fn complete_basis(y: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, k) = y.shape();
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.view_mut((0, 0), (n, k)).copy_from(y);
    m.qr().q()
}

fn random_orthonormal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

/// `lambda_k^+` (or `lambda_k^-`) by minimizing, over `k`-dimensional
/// subspaces `V` of `H+`, the largest eigenvalue of the compression of `A` to
/// `V (+) H-`. Each random start runs gradient descent over frames and then
/// coordinate descent over plane rotations; starts stop once three of them
/// agree on the smallest value to `1e-10`.
pub fn brute_force_oracle(op: &DecomposedOperator, k: usize, side: Side) -> Result<f64> {
    brute_force_oracle_seeded(op, k, side, DEFAULT_SEED, ORACLE_RESTARTS)
}

pub fn brute_force_oracle_seeded(
    op: &DecomposedOperator,
    k: usize,
    side: Side,
    seed: u64,
    restarts: usize,
) -> Result<f64> {
    if op.dim() > ORACLE_MAX_DIM {
        return Err(GapError::OracleTooLarge { dim: op.dim(), cap: ORACLE_MAX_DIM });
    }
    let target = match side {
        Side::Plus => op.clone(),
        Side::Minus => op.negate_and_swap(),
    };
    let n = target.n_plus();
    if k == 0 || k > n {
        return Err(GapError::IndexOutOfRange { k, max: n });
    }
    let value = if k == n {
        compressed_max(&target, &DMatrix::identity(n, n))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut found: Vec<f64> = Vec::new();
        for i in 0..restarts.max(1) {
            let start = random_orthonormal(n, &mut rng).columns(0, k).into_owned();
            let y = gradient_phase(&target, start);
            found.push(descend(&target, k, complete_basis(&y, &mut rng)));
            let best = found.iter().copied().fold(f64::INFINITY, f64::min);
            let agree = found.iter().filter(|&&v| v - best <= 1e-10 * (1.0 + best.abs())).count();
            if i + 1 >= MIN_STARTS && agree >= AGREEING_STARTS {
                break;
            }
        }
        found.into_iter().fold(f64::INFINITY, f64::min)
    };
    Ok(side.sign() * value)
}
