//! C ABI over the audit library.
//!
//! Every fallible function returns an [`A11yStatus`] and writes its result
//! through an out-pointer. On failure `a11y_last_error` describes what went
//! wrong on the calling thread. Strings returned through `char **` are owned
//! by the caller and must be released with `a11y_string_free`; handles are
//! released with their matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use a11y_audit::audit::{audit_with_config, AuditOptions};
use a11y_audit::config::{Config, FailOn};
use a11y_audit::content::Rgb;
use a11y_audit::report::{render, render_diff, ReportFormat};
use a11y_audit::snapshot::{apply_baseline, diff, Baseline};
use a11y_audit::{AuditSnapshot, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum A11yStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Config = 5,
    Internal = 6,
}

/// Opaque audit configuration.
pub struct A11yConfig(Config);

/// Opaque audit snapshot.
pub struct A11ySnapshot(AuditSnapshot);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(A11yStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => A11yStatus::Io,
            Error::Config(_) | Error::Timestamp(_) => A11yStatus::Config,
            Error::Encoding { .. } | Error::Schema { .. } | Error::Malformed { .. } => A11yStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn null(what: &str) -> Failure {
    Failure(A11yStatus::NullArgument, format!("{what} is null"))
}

/// Run `f`, record any failure or panic, and return the status.
fn guard(f: impl FnOnce() -> Outcome<()>) -> A11yStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            A11yStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            A11yStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(A11yStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Outcome<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, bytes: Vec<u8>) -> Outcome<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(bytes).map_err(|_| Failure(A11yStatus::Internal, "output contains a NUL byte".into()))?;
    out.write(c.into_raw());
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Outcome<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn parse_format(s: &str) -> Outcome<ReportFormat> {
    s.parse().map_err(|e| Failure(A11yStatus::Config, e))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn a11y_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_config_new_default(out: *mut *mut A11yConfig) -> A11yStatus {
    guard(|| put_box(out, A11yConfig(Config::default())))
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_config_from_json(json: *const c_char, out: *mut *mut A11yConfig) -> A11yStatus {
    guard(|| {
        let config = Config::from_json("config", str_arg(json, "json")?.as_bytes())?;
        put_box(out, A11yConfig(config))
    })
}

/// # Safety
/// `config` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn a11y_config_free(config: *mut A11yConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Audit the directory at `root`. A null `config` loads
/// `<root>/a11y.config.json` if present; a null `timestamp` uses the
/// current time.
///
/// # Safety
/// String arguments must be NUL-terminated or null where allowed; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_audit_dir(
    root: *const c_char,
    config: *const A11yConfig,
    timestamp: *const c_char,
    out: *mut *mut A11ySnapshot,
) -> A11yStatus {
    guard(|| {
        let root = Path::new(str_arg(root, "root")?);
        let config = match config.as_ref() {
            Some(c) => c.0.clone(),
            None => Config::load(root, None)?,
        };
        let options = AuditOptions {
            timestamp: opt_str_arg(timestamp, "timestamp")?.map(String::from),
            ..Default::default()
        };
        let outcome = audit_with_config(root, config, &options)?;
        put_box(out, A11ySnapshot(outcome.snapshot))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_snapshot_from_json(json: *const c_char, out: *mut *mut A11ySnapshot) -> A11yStatus {
    guard(|| {
        let snapshot = AuditSnapshot::from_json("snapshot", str_arg(json, "json")?.as_bytes())?;
        put_box(out, A11ySnapshot(snapshot))
    })
}

/// # Safety
/// `snapshot` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn a11y_snapshot_free(snapshot: *mut A11ySnapshot) {
    if !snapshot.is_null() {
        drop(Box::from_raw(snapshot));
    }
}

/// Canonical snapshot JSON.
///
/// # Safety
/// `snapshot` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_snapshot_to_json(snapshot: *const A11ySnapshot, out: *mut *mut c_char) -> A11yStatus {
    guard(|| put_string(out, handle(snapshot, "snapshot")?.0.to_json()))
}

/// Render as `"json"`, `"csv"` or `"markdown"`.
///
/// # Safety
/// `snapshot` must be a live handle, `format` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn a11y_snapshot_render(
    snapshot: *const A11ySnapshot,
    format: *const c_char,
    out: *mut *mut c_char,
) -> A11yStatus {
    guard(|| {
        let format = parse_format(str_arg(format, "format")?)?;
        put_string(out, render(&handle(snapshot, "snapshot")?.0, format))
    })
}

/// # Safety
/// `snapshot` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_snapshot_issue_count(snapshot: *const A11ySnapshot, out: *mut usize) -> A11yStatus {
    guard(|| put(out, handle(snapshot, "snapshot")?.0.issues.len()))
}

/// Issues that would fail the gate. `baseline_json` (a JSON list of
/// fingerprints) may be null; `fail_on` is `"error"` or `"warning"`.
///
/// # Safety
/// `snapshot` must be a live handle, strings NUL-terminated or null where
/// allowed, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn a11y_snapshot_gate_count(
    snapshot: *const A11ySnapshot,
    baseline_json: *const c_char,
    fail_on: *const c_char,
    out: *mut usize,
) -> A11yStatus {
    guard(|| {
        let snapshot = &handle(snapshot, "snapshot")?.0;
        let baseline = match opt_str_arg(baseline_json, "baseline_json")? {
            Some(json) => Baseline::from_json("baseline", json.as_bytes())?,
            None => Baseline::default(),
        };
        let fail_on: FailOn = str_arg(fail_on, "fail_on")?
            .parse()
            .map_err(|e| Failure(A11yStatus::Config, e))?;
        put(out, apply_baseline(snapshot, &baseline).gate_count(fail_on))
    })
}

/// Diff two snapshots, rendered as `"json"`, `"csv"` or `"markdown"`.
///
/// # Safety
/// Handles must be live, `format` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn a11y_diff(
    old: *const A11ySnapshot,
    new: *const A11ySnapshot,
    format: *const c_char,
    out: *mut *mut c_char,
) -> A11yStatus {
    guard(|| {
        let report = diff(&handle(old, "old")?.0, &handle(new, "new")?.0);
        let format = parse_format(str_arg(format, "format")?)?;
        put_string(out, render_diff(&report, format))
    })
}

/// Contrast ratio between two `0xRRGGBB` colors. Bits above 24 are ignored.
#[no_mangle]
pub extern "C" fn a11y_contrast_ratio(foreground: u32, background: u32) -> f64 {
    a11y_audit::contrast_ratio(Rgb::from_hex24(foreground), Rgb::from_hex24(background))
}

/// The rule catalog as JSON.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn a11y_rules_json(out: *mut *mut c_char) -> A11yStatus {
    guard(|| put_string(out, a11y_audit::canonical::to_vec(&a11y_audit::rules::catalog())))
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn a11y_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

