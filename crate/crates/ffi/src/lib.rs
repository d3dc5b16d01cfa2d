//! C ABI over `efc-core`.
//!
//! Measures live behind an opaque `EfcMeasure` handle. Every call returns an
//! `EfcStatus`; on failure `efc_last_error()` holds a message for the calling
//! thread. Strings handed out by the library are freed with
//! `efc_string_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use efc_core::closures::{in_variation_closure, Decision};
use efc_core::expfam::member::log_partition;
use efc_core::expfam::param::ParamSet;
use efc_core::faces::enumerate_faces;
use efc_core::cli::inputs::{load_member, parse_theta};
use efc_core::measure::{MeasureFile, MixedMeasure};
use efc_core::{fixtures, Error};

/// Result of every call. The nonzero values match the `efc` exit codes
/// where both exist.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EfcStatus {
    Ok = 0,
    InvalidInput = 2,
    Unsupported = 3,
    PrecisionUnreachable = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque measure.
pub struct EfcMeasure {
    inner: MixedMeasure,
}

/// Three-valued closure decision.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EfcDecision {
    False = 0,
    True = 1,
    Unknown = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EfcStatus {
    match e.exit_code() {
        3 => EfcStatus::Unsupported,
        4 => EfcStatus::PrecisionUnreachable,
        _ => EfcStatus::InvalidInput,
    }
}

/// Runs `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (EfcStatus, String)>) -> EfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EfcStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            EfcStatus::Panic
        }
    }
}

fn core(e: Error) -> (EfcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (EfcStatus, String) {
    (EfcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (EfcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (EfcStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn measure<'a>(m: *const EfcMeasure) -> Result<&'a MixedMeasure, (EfcStatus, String)> {
    m.as_ref().map(|h| &h.inner).ok_or_else(|| null("measure"))
}

fn hand_out(m: MixedMeasure, out: *mut *mut EfcMeasure) {
    unsafe { *out = Box::into_raw(Box::new(EfcMeasure { inner: m })) };
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn efc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a measure file (JSON text).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn efc_measure_from_json(json: *const c_char, out: *mut *mut EfcMeasure) -> EfcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = text(json, "json")?;
        let m = MeasureFile::from_json(t).and_then(|f| f.to_measure()).map_err(core)?;
        hand_out(m, out);
        Ok(())
    })
}

/// Builds a named fixture: seg, tri, line, ray or ex3d.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn efc_measure_fixture(name: *const c_char, out: *mut *mut EfcMeasure) -> EfcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = fixtures::by_name(text(name, "name")?).map_err(core)?;
        hand_out(m, out);
        Ok(())
    })
}

/// Releases a measure. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn efc_measure_free(m: *mut EfcMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Ambient dimension, 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn efc_measure_dim(m: *const EfcMeasure) -> usize {
    m.as_ref().map_or(0, |h| h.inner.dim)
}

/// Certified enclosure `[lo, hi]` of the log-partition function. `theta`
/// holds `dim` strings, each `"p/q"` or `"ln(p/q)"`.
///
/// # Safety
/// `theta` must point to `dim` NUL-terminated strings; `lo` and `hi` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn efc_log_partition(
    m: *const EfcMeasure,
    theta: *const *const c_char,
    dim: usize,
    eps: f64,
    lo: *mut f64,
    hi: *mut f64,
) -> EfcStatus {
    guard(|| {
        let mu = measure(m)?;
        if theta.is_null() || lo.is_null() || hi.is_null() {
            return Err(null("argument"));
        }
        let row = (0..dim).map(|i| text(*theta.add(i), "theta entry").map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
        let t = parse_theta(&row, mu.dim).map_err(core)?;
        let v = log_partition(mu, &t, eps).map_err(core)?;
        *lo = v.lo;
        *hi = v.hi;
        Ok(())
    })
}

/// Number of faces of the convex core; `Unsupported` for curve families.
///
/// # Safety
/// `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn efc_face_count(m: *const EfcMeasure, count: *mut usize) -> EfcStatus {
    guard(|| {
        let mu = measure(m)?;
        if count.is_null() {
            return Err(null("count"));
        }
        *count = enumerate_faces(mu).map_err(core)?.len();
        Ok(())
    })
}

/// Variation-closure membership of a member (`{"chain": ..., "theta": ...}`)
/// for the full canonical parameter set.
///
/// # Safety
/// `member` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn efc_in_variation_closure(m: *const EfcMeasure, member: *const c_char, out: *mut EfcDecision) -> EfcStatus {
    guard(|| {
        let mu = measure(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (p, _) = load_member(text(member, "member")?, mu).map_err(core)?;
        let xi = ParamSet::theta(mu).map_err(core)?;
        let v = in_variation_closure(mu, &xi, &p, 0).map_err(core)?;
        *out = match v.decision {
            Decision::True => EfcDecision::True,
            Decision::False => EfcDecision::False,
            Decision::Unknown => EfcDecision::Unknown,
        };
        Ok(())
    })
}

/// Runs an `efc` command line (without the program name). The report or
/// error document goes to `*out`; the return value is the exit code.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn efc_run(argv: *const *const c_char, argc: usize, out: *mut *mut c_char) -> i32 {
    let mut code = EfcStatus::Panic as i32;
    let status = guard(|| {
        if out.is_null() || (argv.is_null() && argc > 0) {
            return Err(null("argument"));
        }
        let mut args = vec!["efc".to_string()];
        for i in 0..argc {
            args.push(text(*argv.add(i), "argv entry")?.to_string());
        }
        let (c, stdout, stderr) = efc_core::cli::execute(args);
        code = c;
        let doc = if c == 0 { stdout } else { stderr };
        *out = CString::new(doc).map_err(|_| (EfcStatus::Panic, "report holds NUL".to_string()))?.into_raw();
        Ok(())
    });
    if status == EfcStatus::Ok {
        code
    } else {
        status as i32
    }
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn efc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
