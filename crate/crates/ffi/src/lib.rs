//! C ABI over the lipbox engine.
//!
//! Instances are loaded from the same JSON format the CLI reads and held
//! behind an opaque handle. Every call returns a [`LipboxStatus`]; on failure
//! the message is available from [`lipbox_last_error`] on the same thread.
//! Strings handed out by the library must be released with
//! [`lipbox_string_free`]; values are exact rationals such as `"3/2"`, or
//! `"[lo, hi]"` for enclosures.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lipbox::cli::{self, Entry, Instance, NormKind, RouteChoice, Suites, SummingKind};
use lipbox::{Caps, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LipboxStatus {
    Ok = 0,
    /// A verification check failed, or a solver did not converge.
    Failed = 1,
    /// Malformed instance, unknown object name, bad exponent, ...
    Input = 2,
    CapExceeded = 3,
    NullPointer = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LipboxNorm {
    Lipl = 0,
    Lip = 1,
    Blip = 2,
    Free = 3,
    Pi = 4,
    Eps = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LipboxSumming {
    LipP = 0,
    Q = 1,
    Dominated = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LipboxRoute {
    A = 0,
    B = 1,
    Both = 2,
}

/// Size limits; see `lipbox_caps_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LipboxCaps {
    pub points: usize,
    pub dim: usize,
    pub vertices: usize,
    pub iterations: usize,
}

pub const LIPBOX_SUITE_S2: u32 = 1;
pub const LIPBOX_SUITE_S3: u32 = 2;
pub const LIPBOX_SUITE_S4: u32 = 4;

/// Opaque handle to a validated instance.
pub struct LipboxInstance {
    instance: Vec<(String, Instance)>,
    caps: Caps,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let msg = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(LipboxStatus, String);

impl From<Error> for Fail {
    fn from(err: Error) -> Self {
        let status = match cli::exit_code(&err) {
            cli::EXIT_CAP => LipboxStatus::CapExceeded,
            cli::EXIT_INPUT => LipboxStatus::Input,
            _ => LipboxStatus::Failed,
        };
        Fail(status, err.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LipboxStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error, and turns panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LipboxStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LipboxStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            LipboxStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(LipboxStatus::Input, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const LipboxInstance) -> Result<&'a LipboxInstance, Fail> {
    p.as_ref().ok_or_else(|| null("instance"))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Writes `s` into `out` when `out` is non-null.
unsafe fn put(out: *mut *mut c_char, s: impl FnOnce() -> String) {
    if !out.is_null() {
        *out = to_c(s());
    }
}

fn entries_json(entries: &[Entry]) -> String {
    serde_json::to_string_pretty(entries).expect("entries serialize")
}

/// A failed verification check is reported as `Failed` even though values
/// were produced (and written out).
fn checked(entries: &[Entry]) -> Result<(), Fail> {
    match entries.iter().flat_map(|e| &e.verification).find(|c| !c.passed) {
        Some(c) => Err(Fail(LipboxStatus::Failed, format!("verification failed: {}", c.name))),
        None => Ok(()),
    }
}

#[no_mangle]
pub extern "C" fn lipbox_caps_default() -> LipboxCaps {
    let c = Caps::default();
    LipboxCaps { points: c.points, dim: c.dim, vertices: c.vertices, iterations: c.iterations }
}

/// Message for the last failing call on this thread, or null. Owned by the
/// library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn lipbox_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn lipbox_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an instance. `caps` may be null for the defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string, `caps` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lipbox_instance_from_json(
    json: *const c_char,
    caps: *const LipboxCaps,
    out: *mut *mut LipboxInstance,
) -> LipboxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let json = text(json, "json")?;
        let caps = match caps.as_ref() {
            Some(c) => {
                Caps { points: c.points, dim: c.dim, vertices: c.vertices, iterations: c.iterations, ..Caps::default() }
            }
            None => Caps::default(),
        };
        let instance = Instance::parse_str(json, &caps)?;
        *out = Box::into_raw(Box::new(LipboxInstance { instance: vec![(String::new(), instance)], caps }));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle from `lipbox_instance_from_json`, freed once.
#[no_mangle]
pub unsafe extern "C" fn lipbox_instance_free(inst: *mut LipboxInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// The instance re-emitted as canonical JSON.
///
/// # Safety
/// `inst` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lipbox_instance_to_json(inst: *const LipboxInstance, out: *mut *mut c_char) -> LipboxStatus {
    guard(|| {
        let h = handle(inst)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c(h.instance[0].1.emit().to_json());
        Ok(())
    })
}

/// A norm of the named object (`free` takes an expression such as "a+b" or
/// "SPACE:2a - b"). `value` and `report` (JSON) are each optional.
///
/// # Safety
/// `inst` must be a live handle, `object` a NUL-terminated string, and the
/// out-pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn lipbox_norm(
    inst: *const LipboxInstance,
    kind: LipboxNorm,
    object: *const c_char,
    value: *mut *mut c_char,
    report: *mut *mut c_char,
) -> LipboxStatus {
    guard(|| {
        let h = handle(inst)?;
        let object = text(object, "object")?;
        let kind = match kind {
            LipboxNorm::Lipl => NormKind::LipL,
            LipboxNorm::Lip => NormKind::Lip,
            LipboxNorm::Blip => NormKind::BLip,
            LipboxNorm::Free => NormKind::Free,
            LipboxNorm::Pi => NormKind::Pi,
            LipboxNorm::Eps => NormKind::Eps,
        };
        let entry = cli::norm(kind, &h.instance[0].1, object, &h.caps)?;
        put(value, || entry.value.to_string());
        let entries = [entry];
        put(report, || entries_json(&entries));
        checked(&entries)
    })
}

/// Summing norms. `p` and `q` are rationals as text ("1", "3/2"); `route`
/// only matters for `Dominated`. `value` receives the last entry's value:
/// for dominated (1,1) that is the certified two-measure constant.
///
/// # Safety
/// As for `lipbox_norm`; `p` and `q` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn lipbox_summing(
    inst: *const LipboxInstance,
    kind: LipboxSumming,
    object: *const c_char,
    p: *const c_char,
    q: *const c_char,
    route: LipboxRoute,
    value: *mut *mut c_char,
    report: *mut *mut c_char,
) -> LipboxStatus {
    guard(|| {
        let h = handle(inst)?;
        let (object, p, q) = (text(object, "object")?, text(p, "p")?, text(q, "q")?);
        let kind = match kind {
            LipboxSumming::LipP => SummingKind::LipP,
            LipboxSumming::Q => SummingKind::Q,
            LipboxSumming::Dominated => SummingKind::Dominated,
        };
        let route = match route {
            LipboxRoute::A => RouteChoice::A,
            LipboxRoute::B => RouteChoice::B,
            LipboxRoute::Both => RouteChoice::Both,
        };
        let entries = cli::summing(kind, &h.instance[0].1, object, p, q, route, &h.caps)?;
        if let Some(last) = entries.last() {
            put(value, || last.value.to_string());
        }
        put(report, || entries_json(&entries));
        checked(&entries)
    })
}

/// Integral norm of an operator, optionally with the L∞ factorization
/// (scalar codomain only).
///
/// # Safety
/// As for `lipbox_norm`.
#[no_mangle]
pub unsafe extern "C" fn lipbox_integral(
    inst: *const LipboxInstance,
    object: *const c_char,
    factorize: bool,
    value: *mut *mut c_char,
    report: *mut *mut c_char,
) -> LipboxStatus {
    guard(|| {
        let h = handle(inst)?;
        let object = text(object, "object")?;
        let entries = cli::integral(&h.instance[0].1, object, factorize, &h.caps)?;
        put(value, || entries[0].value.to_string());
        put(report, || entries_json(&entries));
        checked(&entries)
    })
}

/// Replays the identity suites selected by `suites` (a mask of
/// `LIPBOX_SUITE_*`, 0 meaning all). Returns `Failed` if any check fails.
///
/// # Safety
/// `inst` must be a live handle; every out-pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn lipbox_verify(
    inst: *const LipboxInstance,
    suites: u32,
    total: *mut usize,
    failed: *mut usize,
    report: *mut *mut c_char,
) -> LipboxStatus {
    guard(|| {
        let h = handle(inst)?;
        let suites = if suites == 0 {
            Suites::ALL
        } else {
            Suites {
                s2: suites & LIPBOX_SUITE_S2 != 0,
                s3: suites & LIPBOX_SUITE_S3 != 0,
                s4: suites & LIPBOX_SUITE_S4 != 0,
            }
        };
        let checks = cli::verify_suite(&h.instance, suites, &h.caps)?;
        let bad = checks.iter().filter(|c| !c.passed).count();
        if let Some(t) = total.as_mut() {
            *t = checks.len();
        }
        if let Some(f) = failed.as_mut() {
            *f = bad;
        }
        put(report, || serde_json::to_string_pretty(&checks).expect("checks serialize"));
        if bad > 0 {
            return Err(Fail(LipboxStatus::Failed, format!("{bad} of {} checks failed", checks.len())));
        }
        Ok(())
    })
}
