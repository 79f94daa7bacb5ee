//! C ABI over the funho engine.
//!
//! Handles are opaque. Every fallible call returns a `FunhoStatus`; on anything
//! other than `FUNHO_STATUS_OK` a message is available from
//! `funho_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use funho::algkit::AlgebraSpec;
use funho::exactlin::ScalarField;
use funho::theories::{AnyPipeline, Theory};
use funho::verify::{render_report, run_suite, Corpus, ReportFormat, RunConfig, Suite, SuiteReport};
use funho::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunhoStatus {
    Ok = 0,
    VerifyFailed = 1,
    InvalidInput = 2,
    Resource = 3,
    Internal = 4,
    NullPointer = 5,
}

/// An algebra over a field, with its lazily built complexes.
pub struct FunhoAlgebra {
    dim: usize,
    pipeline: AnyPipeline,
}

/// A finished verification run.
pub struct FunhoReport {
    report: SuiteReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> FunhoStatus {
    match e.exit_code() {
        2 => FunhoStatus::InvalidInput,
        3 => FunhoStatus::Resource,
        _ => FunhoStatus::Internal,
    }
}

fn guard(body: impl FnOnce() -> Result<FunhoStatus, FunhoStatus>) -> FunhoStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            FunhoStatus::Internal
        }
    }
}

fn fail(e: Error) -> FunhoStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> FunhoStatus {
    set_error(format!("{what} is null"));
    FunhoStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, FunhoStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        FunhoStatus::InvalidInput
    })
}

unsafe fn read_opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, FunhoStatus> {
    if p.is_null() {
        Ok(None)
    } else {
        read_str(p, what).map(Some)
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, FunhoStatus> {
    s.parse().map_err(fail)
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>, FunhoStatus> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse).collect()
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn funho_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn funho_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an algebra such as `trunc:2` over a field such as `q` or `f3`.
/// `max_ambient_dim` of 0 selects the default cap.
///
/// # Safety
/// `spec` and `field` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn funho_algebra_new(
    spec: *const c_char,
    field: *const c_char,
    max_ambient_dim: u64,
    out: *mut *mut FunhoAlgebra,
) -> FunhoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let spec: AlgebraSpec = parse(read_str(spec, "spec")?)?;
        let field: ScalarField = parse(read_str(field, "field")?)?;
        let cap = if max_ambient_dim == 0 { funho::theories::DEFAULT_CAP } else { max_ambient_dim as u128 };
        let pipeline = AnyPipeline::for_algebra(&spec, field, cap).map_err(fail)?;
        let dim = pipeline.algebra_dim().unwrap_or(0);
        *out = Box::into_raw(Box::new(FunhoAlgebra { dim, pipeline }));
        Ok(FunhoStatus::Ok)
    })
}

/// # Safety
/// `alg` must come from `funho_algebra_new`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn funho_algebra_dim(alg: *const FunhoAlgebra, out: *mut usize) -> FunhoStatus {
    guard(|| {
        let a = alg.as_ref().ok_or_else(|| null("algebra"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = a.dim;
        Ok(FunhoStatus::Ok)
    })
}

/// # Safety
/// `alg` must come from `funho_algebra_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn funho_algebra_free(alg: *mut FunhoAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Writes dims of `theory` (hh, hc, hgamma, hgammac) in degrees 0..=max_degree into `out`,
/// which must hold `max_degree + 1` entries.
///
/// # Safety
/// `alg` must be a live handle, `theory` a NUL-terminated string, `out` an array of `len` entries.
#[no_mangle]
pub unsafe extern "C" fn funho_homology_dims(
    alg: *const FunhoAlgebra,
    theory: *const c_char,
    max_degree: usize,
    out: *mut usize,
    len: usize,
) -> FunhoStatus {
    guard(|| {
        let a = alg.as_ref().ok_or_else(|| null("algebra"))?;
        let theory: Theory = parse(read_str(theory, "theory")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < max_degree + 1 {
            set_error(format!("output holds {len} entries, need {}", max_degree + 1));
            return Err(FunhoStatus::InvalidInput);
        }
        let dims = a.pipeline.table(theory, max_degree).map_err(fail)?.dims();
        std::slice::from_raw_parts_mut(out, dims.len()).copy_from_slice(&dims);
        Ok(FunhoStatus::Ok)
    })
}

/// The homology table as JSON. Free the string with `funho_string_free`.
///
/// # Safety
/// `alg` must be a live handle, `theory` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn funho_table_json(
    alg: *const FunhoAlgebra,
    theory: *const c_char,
    max_degree: usize,
    out: *mut *mut c_char,
) -> FunhoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let a = alg.as_ref().ok_or_else(|| null("algebra"))?;
        let theory: Theory = parse(read_str(theory, "theory")?)?;
        let t = a.pipeline.table(theory, max_degree).map_err(fail)?;
        let json = serde_json::to_string_pretty(&t).map_err(|e| fail(e.into()))?;
        *out = CString::new(json).map_err(|_| FunhoStatus::Internal)?.into_raw();
        Ok(FunhoStatus::Ok)
    })
}

/// Runs a suite. `algebras` and `fields` are comma lists; null selects the default corpus.
/// Returns `FUNHO_STATUS_OK` or `FUNHO_STATUS_VERIFY_FAILED` with `*out` set in both cases.
///
/// # Safety
/// String arguments must be NUL-terminated or null where allowed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn funho_verify(
    suite: *const c_char,
    algebras: *const c_char,
    fields: *const c_char,
    max_degree: usize,
    seed: u64,
    out: *mut *mut FunhoReport,
) -> FunhoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let suite: Suite = parse(read_str(suite, "suite")?)?;
        let mut corpus = Corpus { max_degree, ..Corpus::default() };
        if let Some(s) = read_opt_str(algebras, "algebras")? {
            corpus.algebras = parse_list(s)?;
        }
        if let Some(s) = read_opt_str(fields, "fields")? {
            corpus.fields = parse_list(s)?;
        }
        let cfg = RunConfig { corpus, seed, ..RunConfig::default() };
        let report = run_suite(suite, &cfg).map_err(fail)?;
        let json = render_report(&report.without_timings(), ReportFormat::Json).map_err(fail)?;
        let json = CString::new(json).map_err(|_| FunhoStatus::Internal)?;
        let failed = report.failed();
        *out = Box::into_raw(Box::new(FunhoReport { report, json }));
        Ok(if failed { FunhoStatus::VerifyFailed } else { FunhoStatus::Ok })
    })
}

/// `FUNHO_STATUS_OK` if no check failed, else `FUNHO_STATUS_VERIFY_FAILED`.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn funho_report_status(r: *const FunhoReport) -> FunhoStatus {
    match r.as_ref() {
        None => null("report"),
        Some(r) if r.report.failed() => FunhoStatus::VerifyFailed,
        Some(_) => FunhoStatus::Ok,
    }
}

/// # Safety
/// `r` must be a live report handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn funho_report_counts(
    r: *const FunhoReport,
    pass: *mut usize,
    fail: *mut usize,
    skipped: *mut usize,
) -> FunhoStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        if pass.is_null() || fail.is_null() || skipped.is_null() {
            return Err(null("count output"));
        }
        *pass = r.report.summary.pass;
        *fail = r.report.summary.fail;
        *skipped = r.report.summary.skipped;
        Ok(FunhoStatus::Ok)
    })
}

/// Report JSON without timings, owned by the report.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn funho_report_json(r: *const FunhoReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `r` must come from `funho_verify` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn funho_report_free(r: *mut FunhoReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must come from this library's string-returning calls. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn funho_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
