//! C ABI for soblab.
//!
//! Every fallible call returns a [`SoblabStatus`]; on failure the message is
//! kept per thread and read back with [`soblab_last_error`]. Test functions
//! cross the boundary as opaque [`SoblabFunction`] handles owned by the
//! caller and released with [`soblab_function_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use soblab::corpus::{by_label, parse_manifest, TestFunction};
use soblab::exponent::{
    classify_compact, classify_continuous, BoundaryFlag, Compactness, Continuity, DomainKind, ExtReal,
    Rational, Regime, SobolevIndex, Tag,
};
use soblab::lab::reference_domain;
use soblab::norms::full_norm;
use soblab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SoblabStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Unsupported = 3,
    UnknownLabel = 4,
    NotConverged = 5,
    Internal = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SoblabDomain {
    WholeSpace = 0,
    Bounded = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SoblabMode {
    Continuous = 0,
    Compact = 1,
}

/// Index (N, s, p) with s = s_num / s_den and p = p_num / p_den, or p = inf
/// when `p_inf` is set (p_num and p_den are then ignored).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SoblabIndex {
    pub dim: u32,
    pub s_num: i64,
    pub s_den: i64,
    pub p_num: i64,
    pub p_den: i64,
    pub p_inf: bool,
}

pub const SOBLAB_YES: i32 = 1;
pub const SOBLAB_NO: i32 = 0;
pub const SOBLAB_UNSUPPORTED: i32 = -1;
pub const SOBLAB_NOT_APPLICABLE: i32 = 2;

pub const SOBLAB_FLAG_TARGET_P_MAX: u32 = 1;
pub const SOBLAB_FLAG_CRITICAL_CURVE: u32 = 2;
pub const SOBLAB_FLAG_HOLDER_LINE: u32 = 4;

pub const SOBLAB_TAG_LEN: usize = 16;

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SoblabVerdict {
    /// SOBLAB_YES, SOBLAB_NO or SOBLAB_UNSUPPORTED.
    pub continuous: i32,
    /// As `continuous`, plus SOBLAB_NOT_APPLICABLE on R^N.
    pub compact: i32,
    /// Bitmask of SOBLAB_FLAG_*.
    pub boundary_flags: u32,
    pub trivial: bool,
    /// 0 subcritical, 1 critical, 2 supercritical, -1 unsupported.
    pub regime: i32,
    /// NUL-terminated tags such as "Thm-1.1" or "none".
    pub justification: [c_char; SOBLAB_TAG_LEN],
    pub continuous_tag: [c_char; SOBLAB_TAG_LEN],
    pub compact_tag: [c_char; SOBLAB_TAG_LEN],
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SoblabNorm {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    /// Set when `value` is a grid lower bound (sup-based quantities).
    pub lower_bound: bool,
}

/// Opaque test function.
pub struct SoblabFunction {
    inner: TestFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> SoblabStatus {
    match e {
        Error::InvalidIndex(_)
        | Error::DimensionMismatch(..)
        | Error::Precondition(_)
        | Error::Parse(_)
        | Error::Config(_) => SoblabStatus::InvalidArgument,
        Error::Unsupported(_) => SoblabStatus::Unsupported,
        Error::UnknownLabel(_) => SoblabStatus::UnknownLabel,
        Error::Tolerance(_) => SoblabStatus::NotConverged,
        Error::Io(_) => SoblabStatus::Internal,
    }
}

/// Runs `f`, mapping errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), (SoblabStatus, String)>) -> SoblabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SoblabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SoblabStatus::Internal
        }
    }
}

fn lib<T>(r: soblab::Result<T>) -> Result<T, (SoblabStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SoblabStatus, String) {
    (SoblabStatus::NullPointer, format!("{what} is null"))
}

fn to_index(ix: &SoblabIndex) -> soblab::Result<SobolevIndex> {
    let frac = |n: i64, d: i64, what: &str| {
        if d == 0 {
            Err(Error::InvalidIndex(format!("{what} has zero denominator")))
        } else {
            Ok(Rational::new(n.into(), d.into()))
        }
    };
    let s = frac(ix.s_num, ix.s_den, "s")?;
    let p = if ix.p_inf { ExtReal::Infinity } else { ExtReal::Finite(frac(ix.p_num, ix.p_den, "p")?) };
    SobolevIndex::new(ix.dim, s, p)
}

fn domain_kind(d: SoblabDomain) -> DomainKind {
    match d {
        SoblabDomain::WholeSpace => DomainKind::WholeSpace,
        SoblabDomain::Bounded => DomainKind::BoundedLipschitz,
    }
}

fn tag_buf(t: Tag) -> [c_char; SOBLAB_TAG_LEN] {
    let mut out = [0 as c_char; SOBLAB_TAG_LEN];
    for (o, b) in out.iter_mut().zip(t.as_str().bytes().take(SOBLAB_TAG_LEN - 1)) {
        *o = b as c_char;
    }
    out
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SoblabStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SoblabStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Classifies W^{s,p} -> W^{s~,p~} on `domain`. `mode` picks which question
/// `justification` answers.
///
/// # Safety
/// `source`, `target` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn soblab_classify(
    source: *const SoblabIndex,
    target: *const SoblabIndex,
    domain: SoblabDomain,
    mode: SoblabMode,
    out: *mut SoblabVerdict,
) -> SoblabStatus {
    guard(|| {
        let (src, tgt) = (source.as_ref().ok_or_else(|| null("source"))?, target.as_ref().ok_or_else(|| null("target"))?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (src, tgt) = (lib(to_index(src))?, lib(to_index(tgt))?);
        let d = domain_kind(domain);
        let v = lib(match mode {
            SoblabMode::Continuous => classify_continuous(&src, &tgt, d),
            SoblabMode::Compact => classify_compact(&src, &tgt, d),
        })?;
        *out = SoblabVerdict {
            continuous: match v.continuous {
                Continuity::Yes => SOBLAB_YES,
                Continuity::No => SOBLAB_NO,
                Continuity::Unsupported => SOBLAB_UNSUPPORTED,
            },
            compact: match v.compact {
                Compactness::Yes => SOBLAB_YES,
                Compactness::No => SOBLAB_NO,
                Compactness::NotApplicable => SOBLAB_NOT_APPLICABLE,
                Compactness::Unsupported => SOBLAB_UNSUPPORTED,
            },
            boundary_flags: v
                .boundary_flags
                .iter()
                .map(|f| match f {
                    BoundaryFlag::TargetPMax => SOBLAB_FLAG_TARGET_P_MAX,
                    BoundaryFlag::CriticalCurve => SOBLAB_FLAG_CRITICAL_CURVE,
                    BoundaryFlag::HolderLine => SOBLAB_FLAG_HOLDER_LINE,
                })
                .fold(0, |a, b| a | b),
            trivial: v.trivial,
            regime: match v.regime {
                Regime::Subcritical => 0,
                Regime::Critical => 1,
                Regime::Supercritical => 2,
                Regime::Unsupported => -1,
            },
            justification: tag_buf(v.justification),
            continuous_tag: tag_buf(v.continuous_tag),
            compact_tag: tag_buf(v.compact_tag),
        };
        Ok(())
    })
}

/// Looks up a built-in corpus function by label.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soblab_function_builtin(label: *const c_char, out: *mut *mut SoblabFunction) -> SoblabStatus {
    guard(|| {
        let label = c_str(label, "label")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let inner = lib(by_label(label))?;
        *out = Box::into_raw(Box::new(SoblabFunction { inner }));
        Ok(())
    })
}

/// Builds the entry `label` of a JSON corpus manifest.
///
/// # Safety
/// `manifest_json` and `label` must be NUL-terminated strings and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soblab_function_from_manifest(
    manifest_json: *const c_char,
    label: *const c_char,
    out: *mut *mut SoblabFunction,
) -> SoblabStatus {
    guard(|| {
        let json = c_str(manifest_json, "manifest_json")?;
        let label = c_str(label, "label")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let inner = lib(parse_manifest(json))?
            .into_iter()
            .find(|f| f.label == label)
            .ok_or_else(|| (SoblabStatus::UnknownLabel, format!("unknown corpus label: {label}")))?;
        *out = Box::into_raw(Box::new(SoblabFunction { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `f` must come from a soblab constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn soblab_function_free(f: *mut SoblabFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Space dimension of `f`, or 0 when `f` is null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn soblab_function_dim(f: *const SoblabFunction) -> u32 {
    f.as_ref().map_or(0, |f| f.inner.dim)
}

/// Evaluates `f` at the point `x[0..len]`; `len` must equal the dimension.
///
/// # Safety
/// `f` must be a live handle, `x` must point to `len` doubles and `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soblab_function_eval(
    f: *const SoblabFunction,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> SoblabStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("f"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        if len != f.inner.dim as usize {
            return Err((SoblabStatus::InvalidArgument, format!("point has {len} coordinates, function has dimension {}", f.inner.dim)));
        }
        let mut pt = [0.0; 2];
        pt[..len].copy_from_slice(std::slice::from_raw_parts(x, len));
        *out = f.inner.eval(&pt);
        Ok(())
    })
}

/// ||f||_{W^{s,p}} on R^N or on the reference box [-1,1]^N. `p` may be
/// INFINITY. Returns `NotConverged` (with `out` filled) when the quadrature
/// did not reach `tol`.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn soblab_norm(
    f: *const SoblabFunction,
    domain: SoblabDomain,
    s: f64,
    p: f64,
    tol: f64,
    out: *mut SoblabNorm,
) -> SoblabStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("f"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err((SoblabStatus::InvalidArgument, format!("tolerance {tol} outside (0, 1)")));
        }
        let idx = lib(SobolevIndex::from_f64(f.inner.dim, s, p))?;
        let dom = lib(reference_domain(domain_kind(domain), f.inner.dim))?;
        let r = lib(full_norm(&f.inner, &dom, &idx, tol))?;
        *out = SoblabNorm { value: r.value, error: r.error, converged: r.converged, lower_bound: r.lower_bound };
        if r.converged {
            Ok(())
        } else {
            Err((SoblabStatus::NotConverged, format!("error estimate {} above tolerance", r.error)))
        }
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full message length
/// in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn soblab_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn soblab_status_str(status: SoblabStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SoblabStatus::Ok => c"ok",
        SoblabStatus::InvalidArgument => c"invalid argument",
        SoblabStatus::NullPointer => c"null pointer",
        SoblabStatus::Unsupported => c"unsupported",
        SoblabStatus::UnknownLabel => c"unknown corpus label",
        SoblabStatus::NotConverged => c"tolerance not reached",
        SoblabStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Library version, NUL-terminated.
#[no_mangle]
pub extern "C" fn soblab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

