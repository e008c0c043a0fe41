//! C ABI over the pisen library.
//!
//! Inputs and outputs are JSON strings in the same format the CLI reads and
//! prints. Modules are opaque handles owned by the caller and released with
//! `pisen_module_free`; strings returned through out-pointers are released
//! with `pisen_string_free`. Every function returns a `PisenStatus`; on a
//! non-`Ok` status `pisen_last_error` describes the failure on this thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pisen::document::{example, InputDocument, ModuleJson, Source};
use pisen::padic::PadicContext;
use pisen::phin::validate;
use pisen::pi_sen::{BuildOptions, PiSenModule, DEFAULT_SLACK};
use pisen::verify::{full_report, VerifyOptions};

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PisenStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InputError = 3,
    BuildError = 4,
    CheckFailed = 5,
    Panic = 6,
}

/// A built differential module.
pub struct PisenModule {
    module: PiSenModule,
    total_degree: Option<i64>,
    digest: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(PisenStatus, String);

fn fail<T>(status: PisenStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<PisenStatus, Failure>) -> PisenStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PisenStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return fail(PisenStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(PisenStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

fn slack_or_default(slack: i64) -> i64 {
    if slack < 0 {
        DEFAULT_SLACK
    } else {
        slack
    }
}

fn parse_document(json: &str) -> Result<(InputDocument, PadicContext, Source), Failure> {
    let input = |e: pisen::document::DocumentError| Failure(PisenStatus::InputError, e.to_string());
    let doc = InputDocument::from_json(json).map_err(input)?;
    let ctx = doc.context(None, None).map_err(input)?;
    let source = doc.source(ctx).map_err(input)?;
    Ok((doc, ctx, source))
}

/// Builds a module from an input document. `slack < 0` selects the default.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pisen_module_from_json(
    json: *const c_char,
    slack: i64,
    out: *mut *mut PisenModule,
) -> PisenStatus {
    guard(|| {
        if out.is_null() {
            return fail(PisenStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let (doc, ctx, source) = parse_document(read_str(json, "json")?)?;
        if let Source::Phin(data) = &source {
            let report = validate(data, ctx.p());
            if !report.is_valid() {
                let lines: Vec<String> = report.issues.iter().map(|i| format!("{}: {i}", i.check_id())).collect();
                return fail(PisenStatus::CheckFailed, lines.join("; "));
            }
        }
        let opts = BuildOptions { slack: slack_or_default(slack), ..BuildOptions::default() };
        let module = source
            .build(ctx, opts, true)
            .map_err(|e| Failure(PisenStatus::BuildError, e.to_string()))?;
        let handle = PisenModule { module, total_degree: doc.total_degree, digest: doc.digest() };
        *out = Box::into_raw(Box::new(handle));
        Ok(PisenStatus::Ok)
    })
}

/// Releases a module handle. Null is ignored.
///
/// # Safety
/// `module` must come from `pisen_module_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pisen_module_free(module: *mut PisenModule) {
    if !module.is_null() {
        drop(Box::from_raw(module));
    }
}

/// Dimension of the module, or 0 for a null handle.
///
/// # Safety
/// `module` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pisen_module_dim(module: *const PisenModule) -> usize {
    module.as_ref().map_or(0, |m| m.module.dim())
}

/// Serializes operators, weights and bigrading as JSON.
///
/// # Safety
/// `module` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pisen_module_to_json(module: *const PisenModule, out: *mut *mut c_char) -> PisenStatus {
    guard(|| {
        let (Some(m), false) = (module.as_ref(), out.is_null()) else {
            return fail(PisenStatus::NullPointer, "module or out is null");
        };
        let json = serde_json::to_string(&ModuleJson::new(&m.module, m.total_degree)).expect("serializes");
        *out = into_c_string(json);
        Ok(PisenStatus::Ok)
    })
}

/// Runs every structural check and writes the report as JSON.
/// Returns `CheckFailed` (with the report still written) if any check fails.
///
/// # Safety
/// `module` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pisen_module_verify(
    module: *const PisenModule,
    slack: i64,
    out: *mut *mut c_char,
) -> PisenStatus {
    guard(|| {
        let (Some(m), false) = (module.as_ref(), out.is_null()) else {
            return fail(PisenStatus::NullPointer, "module or out is null");
        };
        let opts = VerifyOptions { slack: slack_or_default(slack), total_degree: m.total_degree };
        let report = full_report(&m.module, opts).with_digest(m.digest.clone());
        *out = into_c_string(serde_json::to_string(&report).expect("serializes"));
        if report.all_passed() {
            Ok(PisenStatus::Ok)
        } else {
            fail(PisenStatus::CheckFailed, format!("failed checks: {}", report.failed_ids().join(", ")))
        }
    })
}

/// Validates the `phin` section of a document and writes
/// `{"valid": bool, "issues": [...]}`. Returns `CheckFailed` when invalid.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pisen_validate_json(json: *const c_char, out: *mut *mut c_char) -> PisenStatus {
    guard(|| {
        if out.is_null() {
            return fail(PisenStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let (_, ctx, source) = parse_document(read_str(json, "json")?)?;
        let Source::Phin(data) = &source else {
            return fail(PisenStatus::InputError, "document has no phin section");
        };
        let report = validate(data, ctx.p());
        let body = serde_json::json!({ "valid": report.is_valid(), "issues": report.issues });
        *out = into_c_string(body.to_string());
        if report.is_valid() {
            Ok(PisenStatus::Ok)
        } else {
            fail(PisenStatus::CheckFailed, "input fails validation")
        }
    })
}

/// Writes a built-in input document. `prime == 0` and `precision <= 0`
/// select the defaults 5 and 24.
///
/// # Safety
/// `name` must be a valid nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pisen_example_json(
    name: *const c_char,
    prime: u64,
    precision: i64,
    out: *mut *mut c_char,
) -> PisenStatus {
    guard(|| {
        if out.is_null() {
            return fail(PisenStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let name = read_str(name, "name")?;
        let p = if prime == 0 { 5 } else { prime };
        let m = if precision <= 0 { 24 } else { precision };
        let ctx = PadicContext::new(p, m).map_err(|e| Failure(PisenStatus::InputError, e.to_string()))?;
        let Some(doc) = example(name, ctx) else {
            return fail(PisenStatus::InputError, format!("unknown example {name:?}"));
        };
        *out = into_c_string(doc.to_json());
        Ok(PisenStatus::Ok)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pisen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn pisen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pisen_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
