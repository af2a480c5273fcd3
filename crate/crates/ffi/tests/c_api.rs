use std::ffi::{c_char, CStr, CString};
use std::ptr;

use soblab_ffi::*;

fn index(dim: u32, s: (i64, i64), p: Option<(i64, i64)>) -> SoblabIndex {
    let (p_num, p_den) = p.unwrap_or((0, 1));
    SoblabIndex { dim, s_num: s.0, s_den: s.1, p_num, p_den, p_inf: p.is_none() }
}

fn tag(buf: &[c_char]) -> String {
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { soblab_last_error(buf.as_mut_ptr(), buf.len()) };
    let s = tag(&buf);
    assert_eq!(n, s.len());
    s
}

fn classify(src: SoblabIndex, tgt: SoblabIndex, d: SoblabDomain, m: SoblabMode) -> (SoblabStatus, SoblabVerdict) {
    let mut v = std::mem::MaybeUninit::<SoblabVerdict>::zeroed();
    let st = unsafe { soblab_classify(&src, &tgt, d, m, v.as_mut_ptr()) };
    (st, unsafe { v.assume_init() })
}

#[test]
fn classify_matches_core_examples() {
    let src = index(2, (1, 2), Some((2, 1)));
    let (st, v) = classify(src, index(2, (1, 4), Some((5, 2))), SoblabDomain::WholeSpace, SoblabMode::Continuous);
    assert_eq!(st, SoblabStatus::Ok);
    assert_eq!((v.continuous, v.compact), (SOBLAB_YES, SOBLAB_NOT_APPLICABLE));
    assert_eq!(tag(&v.justification), "Thm-1.1");

    let (_, v) = classify(src, index(2, (1, 4), None), SoblabDomain::WholeSpace, SoblabMode::Continuous);
    assert_eq!(v.continuous, SOBLAB_NO);
    assert_eq!(tag(&v.justification), "Lemma-2.4");

    let (_, v) = classify(src, src, SoblabDomain::WholeSpace, SoblabMode::Continuous);
    assert!(v.trivial && v.continuous == SOBLAB_YES);

    let (_, v) = classify(src, index(2, (1, 4), Some((2, 1))), SoblabDomain::Bounded, SoblabMode::Compact);
    assert_eq!(v.compact, SOBLAB_YES);
    assert_eq!(tag(&v.justification), "Cor-1.4");
    assert_eq!(v.regime, 0);
}

#[test]
fn classify_rejects_bad_input() {
    let good = index(1, (1, 2), Some((2, 1)));
    let (st, _) = classify(index(1, (3, 2), Some((2, 1))), good, SoblabDomain::WholeSpace, SoblabMode::Continuous);
    assert_eq!(st, SoblabStatus::InvalidArgument);
    assert!(last_error().contains("outside [0,1]"));

    let (st, _) = classify(index(1, (1, 0), Some((2, 1))), good, SoblabDomain::WholeSpace, SoblabMode::Continuous);
    assert_eq!(st, SoblabStatus::InvalidArgument);

    let (st, _) = classify(good, index(2, (1, 2), Some((2, 1))), SoblabDomain::WholeSpace, SoblabMode::Continuous);
    assert_eq!(st, SoblabStatus::InvalidArgument);
    assert!(last_error().contains("dimension mismatch"));

    let st = unsafe { soblab_classify(ptr::null(), &good, SoblabDomain::WholeSpace, SoblabMode::Continuous, ptr::null_mut()) };
    assert_eq!(st, SoblabStatus::NullPointer);
}

#[test]
fn function_handles_and_norm() {
    let label = CString::new("tent").unwrap();
    let mut f: *mut SoblabFunction = ptr::null_mut();
    assert_eq!(unsafe { soblab_function_builtin(label.as_ptr(), &mut f) }, SoblabStatus::Ok);
    assert_eq!(unsafe { soblab_function_dim(f) }, 1);

    let mut y = 0.0;
    let x = [0.25];
    assert_eq!(unsafe { soblab_function_eval(f, x.as_ptr(), 1, &mut y) }, SoblabStatus::Ok);
    assert!((y - 0.75).abs() < 1e-15);
    assert_eq!(unsafe { soblab_function_eval(f, x.as_ptr(), 2, &mut y) }, SoblabStatus::InvalidArgument);

    // ||tent||_{L^2} = sqrt(2/3).
    let mut n = SoblabNorm { value: 0.0, error: 0.0, converged: false, lower_bound: false };
    assert_eq!(unsafe { soblab_norm(f, SoblabDomain::WholeSpace, 0.0, 2.0, 1e-8, &mut n) }, SoblabStatus::Ok);
    assert!((n.value - (2.0f64 / 3.0).sqrt()).abs() < 1e-8);
    assert!(n.converged && !n.lower_bound);

    // ||tent||_{W^{1,2}}^2 = 2/3 + 2.
    assert_eq!(unsafe { soblab_norm(f, SoblabDomain::WholeSpace, 1.0, 2.0, 1e-8, &mut n) }, SoblabStatus::Ok);
    assert!((n.value - (8.0f64 / 3.0).sqrt()).abs() < 1e-7);

    assert_eq!(unsafe { soblab_norm(f, SoblabDomain::WholeSpace, 0.5, 2.0, 2.0, &mut n) }, SoblabStatus::InvalidArgument);
    unsafe { soblab_function_free(f) };
    unsafe { soblab_function_free(ptr::null_mut()) };
}

#[test]
fn manifest_and_unknown_labels() {
    let manifest = CString::new(r#"[{"label": "wide", "family": "bump", "parameters": {"radius": 2}}]"#).unwrap();
    let wide = CString::new("wide").unwrap();
    let missing = CString::new("missing").unwrap();
    let mut f: *mut SoblabFunction = ptr::null_mut();
    assert_eq!(unsafe { soblab_function_from_manifest(manifest.as_ptr(), wide.as_ptr(), &mut f) }, SoblabStatus::Ok);
    let mut y = 0.0;
    assert_eq!(unsafe { soblab_function_eval(f, [1.5].as_ptr(), 1, &mut y) }, SoblabStatus::Ok);
    assert!(y > 0.0);
    unsafe { soblab_function_free(f) };

    assert_eq!(
        unsafe { soblab_function_from_manifest(manifest.as_ptr(), missing.as_ptr(), &mut f) },
        SoblabStatus::UnknownLabel
    );
    assert_eq!(unsafe { soblab_function_builtin(missing.as_ptr(), &mut f) }, SoblabStatus::UnknownLabel);
    assert!(last_error().contains("missing"));
    let bad = CString::new("not json").unwrap();
    assert_eq!(unsafe { soblab_function_from_manifest(bad.as_ptr(), wide.as_ptr(), &mut f) }, SoblabStatus::InvalidArgument);
}

#[test]
fn last_error_truncates() {
    let missing = CString::new("no-such-function").unwrap();
    let mut f: *mut SoblabFunction = ptr::null_mut();
    unsafe { soblab_function_builtin(missing.as_ptr(), &mut f) };
    let full = unsafe { soblab_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as c_char; 8];
    assert_eq!(unsafe { soblab_last_error(buf.as_mut_ptr(), buf.len()) }, full);
    assert_eq!(tag(&buf).len(), 7);
}

#[test]
fn static_strings() {
    let s = unsafe { CStr::from_ptr(soblab_status_str(SoblabStatus::NotConverged)) };
    assert_eq!(s.to_str().unwrap(), "tolerance not reached");
    let v = unsafe { CStr::from_ptr(soblab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
