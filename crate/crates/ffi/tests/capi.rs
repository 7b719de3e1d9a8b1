use std::ffi::CStr;
use std::ptr;

use quadperm_ffi::*;

fn field(p: u32, n: u32) -> *mut QpField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { qp_field_new(p, n, &mut f) }, QpStatus::Ok);
    assert!(!f.is_null());
    f
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qp_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn field_lifecycle_and_arithmetic() {
    let f = field(2, 4);
    let mut size = 0;
    assert_eq!(unsafe { qp_field_size(f, &mut size) }, QpStatus::Ok);
    assert_eq!(size, 16);
    let mut prod = 0;
    assert_eq!(unsafe { qp_field_mul(f, 1, 7, &mut prod) }, QpStatus::Ok);
    assert_eq!(prod, 7);
    assert_eq!(unsafe { qp_field_mul(f, 16, 1, &mut prod) }, QpStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    unsafe { qp_field_free(f) };
    unsafe { qp_field_free(ptr::null_mut()) };
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { qp_field_new(2, 2, ptr::null_mut()) }, QpStatus::NullPointer);
    let mut size = 0;
    assert_eq!(unsafe { qp_field_size(ptr::null(), &mut size) }, QpStatus::NullPointer);
    assert_eq!(last_error(), "null field handle");
    let f = field(2, 2);
    let mut v = QpVerdict::default();
    assert_eq!(unsafe { qp_check(f, 1, 1, 1, ptr::null(), &mut v) }, QpStatus::NullPointer);
    unsafe { qp_field_free(f) };
}

#[test]
fn bad_field_order_fails() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { qp_field_new(4, 2, &mut f) }, QpStatus::FieldError);
    assert!(f.is_null());
}

#[test]
fn status_messages_are_static() {
    let msg = unsafe { CStr::from_ptr(qp_status_message(QpStatus::InvalidArgument)) };
    assert_eq!(msg.to_str().unwrap(), "invalid argument");
    let ok = unsafe { CStr::from_ptr(qp_status_message(QpStatus::Ok)) };
    assert_eq!(ok.to_str().unwrap(), "ok");
}

#[test]
fn check_agrees_with_oracle_on_f16() {
    let f = field(2, 4);
    let r = qp_canonical_r(4, 2);
    assert_ne!(r, 0);
    let mut perms = 0;
    for enc in 1u32..4096 {
        let coeffs = [enc & 15, (enc >> 4) & 15, (enc >> 8) & 15, (enc * 7) & 15];
        let mut v = QpVerdict::default();
        assert_eq!(unsafe { qp_check(f, 2, 1, r, coeffs.as_ptr(), &mut v) }, QpStatus::Ok);
        assert_eq!(v.criterion, v.cond.iter().all(|&c| c));
        if coeffs != [0; 4] {
            assert_eq!(v.criterion, v.oracle, "{coeffs:?}");
        }
        perms += v.oracle as u32;
    }
    assert!(perms > 0);
    unsafe { qp_field_free(f) };
}

#[test]
fn check_rejects_wrong_degree() {
    let f = field(2, 3);
    let coeffs = [1u32, 0, 0, 1];
    let mut v = QpVerdict::default();
    assert_eq!(unsafe { qp_check(f, 1, 1, 1, coeffs.as_ptr(), &mut v) }, QpStatus::InvalidArgument);
    unsafe { qp_field_free(f) };
}

#[test]
fn sweep_exhaustive_and_random() {
    let f = field(2, 4);
    let mut s = QpSweepSummary::default();
    assert_eq!(unsafe { qp_sweep(f, 2, 1, 0, 0, &mut s) }, QpStatus::Ok);
    assert_eq!(s.total, 65536);
    assert_eq!(s.mismatches, 0);
    assert_eq!(s.permutations, 2160);

    let mut a = QpSweepSummary::default();
    let mut b = QpSweepSummary::default();
    assert_eq!(unsafe { qp_sweep(f, 2, 1, 2000, 9, &mut a) }, QpStatus::Ok);
    assert_eq!(unsafe { qp_sweep(f, 2, 1, 2000, 9, &mut b) }, QpStatus::Ok);
    assert_eq!(a, b);
    assert_eq!(a.total, 2000);
    assert_eq!(a.mismatches, 0);
    unsafe { qp_field_free(f) };
}

#[test]
fn identities_hold_for_small_instance() {
    let mut ok = false;
    assert_eq!(unsafe { qp_identity_verify(2, 3, &mut ok) }, QpStatus::Ok);
    assert!(ok);
    assert_eq!(unsafe { qp_identity_verify(6, 3, &mut ok) }, QpStatus::InvalidArgument);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/quadperm.h")).unwrap();
    for name in [
        "qp_field_new",
        "qp_field_free",
        "qp_field_size",
        "qp_field_mul",
        "qp_canonical_r",
        "qp_check",
        "qp_sweep",
        "qp_identity_verify",
        "qp_status_message",
        "qp_last_error",
        "QP_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
