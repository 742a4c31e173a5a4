//! C interface to `gapspec`.
//!
//! Operators are opaque handles created by the `gap_operator_*` and channel
//! constructors and released with [`gap_operator_free`]. Every fallible call
//! returns a [`GapStatus`]; on failure the message is available from
//! [`gap_last_error_message`] on the same thread. Matrices are passed as
//! row-major `double` arrays.

// All pointer arguments are null-checked before use.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gapspec::discretization::{
    analytic_dirac_coulomb_level, analytic_pauli_level, build_dirac_radial, build_pauli_channel,
    PotentialSpec, RadialGrid,
};
use gapspec::{GapError, LevelResult, LevelStatus, Side};
use nalgebra::DMatrix;

/// Opaque operator handle.
pub struct GapOperator {
    inner: gapspec::DecomposedOperator,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonHermitian = 3,
    DimensionMismatch = 4,
    PreconditionViolated = 5,
    NonConvergence = 6,
    Internal = 7,
}

/// Side codes accepted as `int32_t` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapSide {
    Plus = 0,
    Minus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapLevelStatus {
    ClampedAtA = 0,
    Interior = 1,
    ClampedAtB = 2,
}

/// `k0_plus` and `k0_minus` are 0 when unknown.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapProfile {
    pub a_minus: f64,
    pub a_plus: f64,
    pub b_minus: f64,
    pub b_plus: f64,
    pub k0_plus: usize,
    pub k0_minus: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapLevel {
    pub side: GapSide,
    pub k: usize,
    pub value: f64,
    pub status: GapLevelStatus,
    pub residual: f64,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &GapError) -> GapStatus {
    match err {
        GapError::NonHermitian { .. } => GapStatus::NonHermitian,
        GapError::DimensionMismatch(_) => GapStatus::DimensionMismatch,
        GapError::Precondition(_) | GapError::IndexOutOfRange { .. } => GapStatus::PreconditionViolated,
        GapError::NonConvergence { .. } => GapStatus::NonConvergence,
        GapError::Eigen(_) | GapError::InvariantViolation(_) => GapStatus::Internal,
        GapError::AtTau { source, .. } => status_of(source),
        _ => GapStatus::InvalidArgument,
    }
}

/// Run `f`, recording any error or panic for `gap_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (GapStatus, String)>) -> GapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GapStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GapStatus::Internal
        }
    }
}

fn lift<T>(r: gapspec::Result<T>) -> Result<T, (GapStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GapStatus, String) {
    (GapStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (GapStatus, String) {
    (GapStatus::InvalidArgument, msg.into())
}

unsafe fn matrix(data: *const f64, rows: usize, cols: usize, what: &str) -> Result<DMatrix<f64>, (GapStatus, String)> {
    if data.is_null() {
        return Err(null(what));
    }
    let len = rows.checked_mul(cols).ok_or_else(|| invalid(format!("{what} is too large")))?;
    let slice: &[f64] = std::slice::from_raw_parts(data, len);
    Ok(DMatrix::from_row_slice(rows, cols, slice))
}

unsafe fn operator<'a>(op: *const GapOperator) -> Result<&'a gapspec::DecomposedOperator, (GapStatus, String)> {
    op.as_ref().map(|o| &o.inner).ok_or_else(|| null("operator"))
}

unsafe fn emit(out: *mut *mut GapOperator, op: gapspec::DecomposedOperator) {
    *out = Box::into_raw(Box::new(GapOperator { inner: op }));
}

fn side_of(side: i32) -> Result<Side, (GapStatus, String)> {
    match side {
        0 => Ok(Side::Plus),
        1 => Ok(Side::Minus),
        other => Err(invalid(format!("side must be 0 (plus) or 1 (minus), got {other}"))),
    }
}

fn level_out(r: &LevelResult) -> GapLevel {
    GapLevel {
        side: match r.side {
            Side::Plus => GapSide::Plus,
            Side::Minus => GapSide::Minus,
        },
        k: r.k,
        value: r.value,
        status: match r.status {
            LevelStatus::ClampedAtA => GapLevelStatus::ClampedAtA,
            LevelStatus::Interior => GapLevelStatus::Interior,
            LevelStatus::ClampedAtB => GapLevelStatus::ClampedAtB,
        },
        residual: r.residual,
        iterations: r.iterations,
    }
}

fn profile_out(p: &gapspec::GapProfile) -> GapProfile {
    GapProfile {
        a_minus: p.a_minus,
        a_plus: p.a_plus,
        b_minus: p.b_minus,
        b_plus: p.b_plus,
        k0_plus: p.k0_plus.unwrap_or(0),
        k0_minus: p.k0_minus.unwrap_or(0),
    }
}

fn profile_in(p: &GapProfile) -> gapspec::GapProfile {
    let mut out = gapspec::GapProfile::new(p.a_minus, p.a_plus, p.b_minus, p.b_plus);
    out.k0_plus = (p.k0_plus > 0).then_some(p.k0_plus);
    out.k0_minus = (p.k0_minus > 0).then_some(p.k0_minus);
    out
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build an operator from the full `n x n` matrix; the first `n_plus`
/// coordinates span `H+`.
///
/// # Safety
/// `data` must point to `n * n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_operator_from_full(
    data: *const f64,
    n: usize,
    n_plus: usize,
    out: *mut *mut GapOperator,
) -> GapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let full = matrix(data, n, n, "data")?;
        emit(out, lift(gapspec::DecomposedOperator::from_full(&full, n_plus))?);
        Ok(())
    })
}

/// Build an operator from its blocks: `app` is `n_plus x n_plus`, `apm` is
/// `n_plus x n_minus` and `amm` is `n_minus x n_minus`.
///
/// # Safety
/// The block pointers must cover the stated sizes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_operator_from_blocks(
    app: *const f64,
    apm: *const f64,
    amm: *const f64,
    n_plus: usize,
    n_minus: usize,
    out: *mut *mut GapOperator,
) -> GapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let app = matrix(app, n_plus, n_plus, "app")?;
        let apm = matrix(apm, n_plus, n_minus, "apm")?;
        let amm = matrix(amm, n_minus, n_minus, "amm")?;
        emit(out, lift(gapspec::DecomposedOperator::from_blocks(app, apm, amm))?);
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `op` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gap_operator_free(op: *mut GapOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle; `n_plus` and `n_minus` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_operator_dims(
    op: *const GapOperator,
    n_plus: *mut usize,
    n_minus: *mut usize,
) -> GapStatus {
    guard(|| {
        let op = operator(op)?;
        if n_plus.is_null() || n_minus.is_null() {
            return Err(null("output"));
        }
        *n_plus = op.n_plus();
        *n_minus = op.n_minus();
        Ok(())
    })
}

/// `-A` with the two subspaces exchanged, as a new handle.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gap_operator_negate_and_swap(
    op: *const GapOperator,
    out: *mut *mut GapOperator,
) -> GapStatus {
    guard(|| {
        let op = operator(op)?;
        if out.is_null() {
            return Err(null("out"));
        }
        emit(out, op.negate_and_swap());
        Ok(())
    })
}

/// All eigenvalues in ascending order into `values[0..len]`, where `len` must
/// equal the operator dimension.
///
/// # Safety
/// `op` must be a live handle and `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gap_operator_spectrum(
    op: *const GapOperator,
    values: *mut f64,
    len: usize,
) -> GapStatus {
    guard(|| {
        let op = operator(op)?;
        if values.is_null() {
            return Err(null("values"));
        }
        if len != op.dim() {
            return Err((
                GapStatus::DimensionMismatch,
                format!("buffer holds {len} values, operator has dimension {}", op.dim()),
            ));
        }
        let eigs = lift(op.full_spectrum())?;
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(&eigs);
        Ok(())
    })
}

/// Pauli channel `l` with coupling `nu` on the grid `(r_max, n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_pauli_channel(
    nu: f64,
    l: u32,
    r_max: f64,
    n: usize,
    out: *mut *mut GapOperator,
) -> GapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = lift(RadialGrid::new(r_max, n))?;
        emit(out, lift(build_pauli_channel(nu, l, &grid))?);
        Ok(())
    })
}

/// Radial Dirac channel `kappa` with potential `-nu/r` on the grid `(r_max, n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_dirac_coulomb_channel(
    nu: f64,
    kappa: i32,
    r_max: f64,
    n: usize,
    out: *mut *mut GapOperator,
) -> GapStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = lift(RadialGrid::new(r_max, n))?;
        emit(out, lift(build_dirac_radial(&PotentialSpec::coulomb(nu), kappa, &grid))?);
        Ok(())
    })
}

/// Extreme block eigenvalues together with the declared edges.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gap_profile_compute(
    op: *const GapOperator,
    b_minus: f64,
    b_plus: f64,
    out: *mut GapProfile,
) -> GapStatus {
    guard(|| {
        let op = operator(op)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = profile_out(&lift(gapspec::gap_profile(op, b_minus, b_plus))?);
        Ok(())
    })
}

/// Level `k` (1-based) on `side` (0 plus, 1 minus) to tolerance `tol`.
///
/// # Safety
/// `op` must be a live handle, `profile` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gap_solve_level(
    op: *const GapOperator,
    profile: *const GapProfile,
    k: usize,
    side: i32,
    tol: f64,
    out: *mut GapLevel,
) -> GapStatus {
    guard(|| {
        let op = operator(op)?;
        let profile = profile.as_ref().ok_or_else(|| null("profile"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let level = lift(gapspec::solve_level(op, &profile_in(profile), k, side_of(side)?, tol))?;
        *out = level_out(&level);
        Ok(())
    })
}

/// Exact level `n` of the Pauli model on `side`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_analytic_pauli_level(nu: f64, n: u32, side: i32, out: *mut f64) -> GapStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lift(analytic_pauli_level(nu, n, side_of(side)?))?;
        Ok(())
    })
}

/// Exact Dirac-Coulomb bound state with radial quantum number `n_r`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gap_analytic_dirac_coulomb_level(
    nu: f64,
    kappa: i32,
    n_r: u32,
    out: *mut f64,
) -> GapStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = lift(analytic_dirac_coulomb_level(nu, kappa, n_r))?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use std::ffi::CStr;

    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&GapError::Precondition("x".into())), GapStatus::PreconditionViolated);
        let wrapped = GapError::AtTau { tau: 0.5, source: Box::new(GapError::DimensionMismatch("x".into())) };
        assert_eq!(status_of(&wrapped), GapStatus::DimensionMismatch);
    }

    #[test]
    fn panics_become_internal() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, GapStatus::Internal);
        let msg = unsafe { CStr::from_ptr(gap_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal panic");
    }
}
