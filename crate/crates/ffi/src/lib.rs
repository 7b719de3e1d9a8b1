//! C ABI over the quadperm library.
//!
//! Fields are opaque handles created with [`qp_field_new`] and released with [`qp_field_free`].
//! Every fallible call returns a [`QpStatus`]; the message of the most recent failure on the
//! calling thread is available from [`qp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use quadperm::criteria::{canonical_r, conditions, QuadInput};
use quadperm::field::{default_ctx, FieldCtx, FieldElem};
use quadperm::identities::{run_identities, IdentityInstance, Which};
use quadperm::oracle::{is_perm_fq2, SparsePoly};
use quadperm::sweep::{run_sweep, SweepConfig, SweepMode};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FieldError = 3,
    VerificationError = 4,
    Panic = 5,
}

/// Opaque finite field context.
pub struct QpField {
    ctx: Arc<FieldCtx>,
}

/// Criterion and brute-force verdicts for one tuple.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QpVerdict {
    pub criterion: bool,
    pub oracle: bool,
    pub cond: [bool; 5],
}

/// Counts from a criterion-versus-oracle sweep.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QpSweepSummary {
    pub total: u64,
    pub permutations: u64,
    pub mismatches: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), (QpStatus, String)>) -> QpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            QpStatus::Panic
        }
    }
}

fn invalid(msg: impl Into<String>) -> (QpStatus, String) {
    (QpStatus::InvalidArgument, msg.into())
}

fn field_ref<'a>(f: *const QpField) -> Result<&'a QpField, (QpStatus, String)> {
    // SAFETY: non-null handles come from `qp_field_new` and stay valid until `qp_field_free`.
    unsafe { f.as_ref() }.ok_or((QpStatus::NullPointer, "null field handle".into()))
}

fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, (QpStatus, String)> {
    // SAFETY: the caller passes a valid, writable pointer or null.
    unsafe { p.as_mut() }.ok_or((QpStatus::NullPointer, "null output pointer".into()))
}

fn quad_input(field: &QpField, k: u32, l: u32, r: u64, coeffs: *const u32) -> Result<QuadInput, (QpStatus, String)> {
    if coeffs.is_null() {
        return Err((QpStatus::NullPointer, "null coefficient array".into()));
    }
    // SAFETY: the caller provides four readable coefficients.
    let raw = unsafe { std::slice::from_raw_parts(coeffs, 4) };
    let ctx = &field.ctx;
    if k == 0 || l == 0 || ctx.degree() != 2 * k {
        return Err(invalid("the field must have degree 2k"));
    }
    let mut t = [FieldElem::ZERO; 4];
    for (slot, &enc) in t.iter_mut().zip(raw) {
        *slot = ctx.elem(enc as u64).map_err(|e| invalid(e.to_string()))?;
    }
    Ok(QuadInput::new(ctx.characteristic(), k, l, r, t))
}

/// Creates the default field of order `p^n`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn qp_field_new(p: u32, n: u32, out: *mut *mut QpField) -> QpStatus {
    guard(|| {
        let slot = out_ref(out)?;
        let ctx = default_ctx(p, n).map_err(|e| (QpStatus::FieldError, e.to_string()))?;
        *slot = Box::into_raw(Box::new(QpField { ctx }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `field` must be null or a handle from [`qp_field_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qp_field_free(field: *mut QpField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of elements of the field.
///
/// # Safety
/// `field` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_field_size(field: *const QpField, out: *mut u32) -> QpStatus {
    guard(|| {
        *out_ref(out)? = field_ref(field)?.ctx.size();
        Ok(())
    })
}

/// Product of two encoded elements.
///
/// # Safety
/// `field` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_field_mul(field: *const QpField, a: u32, b: u32, out: *mut u32) -> QpStatus {
    guard(|| {
        let ctx = &field_ref(field)?.ctx;
        let x = ctx.elem(a as u64).map_err(|e| invalid(e.to_string()))?;
        let y = ctx.elem(b as u64).map_err(|e| invalid(e.to_string()))?;
        *out_ref(out)? = ctx.mul(x, y).0;
        Ok(())
    })
}

/// Smallest admissible `r` for `(q, Q)`, or 0 when none exists.
#[no_mangle]
pub extern "C" fn qp_canonical_r(q: u64, big_q: u64) -> u64 {
    if q < 2 {
        return 0;
    }
    canonical_r(q, big_q).unwrap_or(0)
}

/// Evaluates the criterion and the brute-force oracle for `X^r A(X^{q−1})` with
/// `A = aX^{Q+1} + bX^Q + cX + d`; `coeffs` holds the encodings of `a, b, c, d`.
///
/// # Safety
/// `field` must be a live handle of degree `2k`, `coeffs` must point to four values and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_check(
    field: *const QpField,
    k: u32,
    l: u32,
    r: u64,
    coeffs: *const u32,
    out: *mut QpVerdict,
) -> QpStatus {
    guard(|| {
        let f = field_ref(field)?;
        let input = quad_input(f, k, l, r, coeffs)?;
        let slot = out_ref(out)?;
        let conds = conditions(&f.ctx, &input);
        let poly = SparsePoly::quad(&f.ctx, &input);
        let oracle = is_perm_fq2(&f.ctx, &poly, input.q()).map_err(|e| (QpStatus::VerificationError, e.to_string()))?;
        *slot = QpVerdict { criterion: conds.verdict(), oracle: oracle.is_permutation, cond: conds.cond };
        Ok(())
    })
}

/// Runs the criterion-versus-oracle sweep; `samples == 0` means exhaustive.
///
/// # Safety
/// `field` must be a live handle of degree `2k` and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_sweep(
    field: *const QpField,
    k: u32,
    l: u32,
    samples: u64,
    seed: u64,
    out: *mut QpSweepSummary,
) -> QpStatus {
    guard(|| {
        let f = field_ref(field)?;
        let slot = out_ref(out)?;
        let mode = if samples == 0 { SweepMode::Exhaustive } else { SweepMode::Random { samples, seed } };
        let cfg = SweepConfig { k, l, r: None, mode, keep_rows: false };
        let rep = run_sweep(&f.ctx, &cfg).map_err(|e| invalid(e.to_string()))?;
        *slot = QpSweepSummary { total: rep.total, permutations: rep.permutations, mismatches: rep.mismatches };
        Ok(())
    })
}

/// Checks every dense bivariate identity for `F_{q^n}`; `out` receives whether all hold.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qp_identity_verify(q: u64, n: u32, out: *mut bool) -> QpStatus {
    guard(|| {
        let slot = out_ref(out)?;
        let rep = run_identities(q, n, Which::All).map_err(|e| invalid(e.to_string()))?;
        let expected = IdentityInstance::new(q, n).map_err(|e| invalid(e.to_string()))?.expected_delta_len();
        *slot = rep.all_pass() && rep.delta_len == expected;
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qp_status_message(status: QpStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        QpStatus::Ok => b"ok\0",
        QpStatus::NullPointer => b"null pointer\0",
        QpStatus::InvalidArgument => b"invalid argument\0",
        QpStatus::FieldError => b"field construction failed\0",
        QpStatus::VerificationError => b"verification failed\0",
        QpStatus::Panic => b"internal panic\0",
    };
    s.as_ptr() as *const c_char
}

/// Message of the last failure on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn qp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
