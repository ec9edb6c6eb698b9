//! C ABI for the analysis pipeline.
//!
//! Every entry point returns a [`WsErrorCode`]; on failure the message is kept
//! per thread and can be fetched with [`ws_last_error_message`]. Strings handed
//! out by the library must be released with [`ws_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wittscaffold::config::{JobConfig, MonomialSpec};
use wittscaffold::pipeline::{self, RunOptions};
use wittscaffold::report::AnalysisReport;
use wittscaffold::Error;

/// Status codes; 2, 3 and 4 agree with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsErrorCode {
    Ok = 0,
    InvalidArgument = 1,
    Validation = 2,
    Invariant = 3,
    PrecisionExhausted = 4,
    Panic = 5,
}

impl From<&Error> for WsErrorCode {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            2 => WsErrorCode::Validation,
            4 => WsErrorCode::PrecisionExhausted,
            _ => WsErrorCode::Invariant,
        }
    }
}

/// Input parameters: `a1 = a1_coeff·π0^a1_exp`, `μ = mu_coeff·π0^mu_exp`,
/// `π0^e0 = p·unit`. A `precision` of zero or less selects the default target.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct WsParams {
    pub p: u32,
    pub e0: u32,
    pub a1_coeff: i64,
    pub a1_exp: i64,
    pub mu_coeff: i64,
    pub mu_exp: i64,
    pub unit: i64,
    pub precision: i64,
}

/// Opaque handle to a finished analysis.
pub struct WsAnalysis {
    report: AnalysisReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn to_c_string(s: String) -> *mut c_char {
    // reports never contain interior NULs; strip defensively rather than fail
    CString::new(s.replace('\0', "")).expect("NUL bytes removed").into_raw()
}

/// Runs `f`, translating errors and panics into codes.
fn guard(f: impl FnOnce() -> Result<(), (WsErrorCode, String)>) -> WsErrorCode {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsErrorCode::Ok,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            WsErrorCode::Panic
        }
    }
}

fn lib_err(e: Error) -> (WsErrorCode, String) {
    (WsErrorCode::from(&e), e.to_string())
}

fn bad_arg(msg: &str) -> (WsErrorCode, String) {
    (WsErrorCode::InvalidArgument, msg.to_string())
}

fn config_from(params: *const WsParams) -> Result<JobConfig, (WsErrorCode, String)> {
    // SAFETY: the caller passes either NULL or a pointer to a live WsParams.
    let p = unsafe { params.as_ref() }.ok_or_else(|| bad_arg("params is NULL"))?;
    if p.a1_coeff == 0 || p.mu_coeff == 0 {
        return Err(bad_arg("monomial coefficients must be nonzero"));
    }
    let text = format!(
        "p = {}\ne0 = {}\na1 = {}\nmu = {}\nunit = {}\n",
        p.p,
        p.e0,
        MonomialSpec::new(p.a1_coeff, p.a1_exp),
        MonomialSpec::new(p.mu_coeff, p.mu_exp),
        p.unit
    );
    let mut cfg = JobConfig::parse(&text).map_err(lib_err)?;
    if p.precision > 0 {
        cfg.precision = Some(p.precision);
    }
    Ok(cfg)
}

/// Parameters of the worked example (`p = 3`, `e0 = 6`, `a1 = μ = π0^-1`).
#[no_mangle]
pub extern "C" fn ws_reference_params() -> WsParams {
    let cfg = JobConfig::reference_example();
    WsParams {
        p: cfg.p,
        e0: cfg.e0,
        a1_coeff: cfg.a1.coeff,
        a1_exp: cfg.a1.exp,
        mu_coeff: cfg.mu.coeff,
        mu_exp: cfg.mu.exp,
        unit: cfg.unit,
        precision: 0,
    }
}

/// Checks the parameter choices and the freeness bound.
/// Returns `WS_ERROR_CODE_VALIDATION` with the violations as the last error if they fail.
///
/// # Safety
/// `params` must be NULL or point to a valid `WsParams`.
#[no_mangle]
pub unsafe extern "C" fn ws_validate(params: *const WsParams) -> WsErrorCode {
    guard(|| {
        let cfg = config_from(params)?;
        let report = pipeline::validate(&cfg).map_err(lib_err)?;
        if report.passed {
            Ok(())
        } else {
            Err((WsErrorCode::Validation, report.violations.join("; ")))
        }
    })
}

/// Runs the full analysis and stores a new handle in `*out`.
///
/// # Safety
/// `params` must be NULL or point to a valid `WsParams`; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ws_analyze(params: *const WsParams, out: *mut *mut WsAnalysis) -> WsErrorCode {
    if out.is_null() {
        set_error("out is NULL");
        return WsErrorCode::InvalidArgument;
    }
    *out = ptr::null_mut();
    guard(|| {
        let cfg = config_from(params)?;
        let report = pipeline::analyze(&cfg, &RunOptions::default()).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(WsAnalysis { report }));
        Ok(())
    })
}

/// Releases a handle from [`ws_analyze`]; NULL is ignored.
///
/// # Safety
/// `handle` must come from `ws_analyze` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ws_analysis_free(handle: *mut WsAnalysis) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Lower ramification breaks `b1`, `b2`.
///
/// # Safety
/// `handle` must be a live handle; the output pointers must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ws_analysis_breaks(handle: *const WsAnalysis, b1: *mut i64, b2: *mut i64) -> WsErrorCode {
    let Some(a) = handle.as_ref() else {
        set_error("handle is NULL");
        return WsErrorCode::InvalidArgument;
    };
    if let Some(b1) = b1.as_mut() {
        *b1 = a.report.ramification.b1;
    }
    if let Some(b2) = b2.as_mut() {
        *b2 = a.report.ramification.b2;
    }
    clear_error();
    WsErrorCode::Ok
}

/// Whether the valuation ring is free over its associated order.
///
/// # Safety
/// `handle` must be a live handle; `free` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_analysis_is_free(handle: *const WsAnalysis, free: *mut bool) -> WsErrorCode {
    match (handle.as_ref(), free.as_mut()) {
        (Some(a), Some(f)) => {
            *f = a.report.structure.free;
            clear_error();
            WsErrorCode::Ok
        }
        _ => {
            set_error("NULL argument");
            WsErrorCode::InvalidArgument
        }
    }
}

/// Copies the `d` table into `buf` (capacity `cap`) and writes its length to `len`.
/// With a short buffer nothing is copied and `len` still reports the size needed.
///
/// # Safety
/// `handle` must be live, `len` writable, and `buf` valid for `cap` elements (or NULL with `cap == 0`).
#[no_mangle]
pub unsafe extern "C" fn ws_analysis_d_table(
    handle: *const WsAnalysis,
    buf: *mut i64,
    cap: usize,
    len: *mut usize,
) -> WsErrorCode {
    let (Some(a), Some(len)) = (handle.as_ref(), len.as_mut()) else {
        set_error("NULL argument");
        return WsErrorCode::InvalidArgument;
    };
    let d = &a.report.tables.d;
    *len = d.len();
    if cap < d.len() || buf.is_null() {
        set_error(format!("buffer holds {cap}, need {}", d.len()));
        return WsErrorCode::InvalidArgument;
    }
    ptr::copy_nonoverlapping(d.as_ptr(), buf, d.len());
    clear_error();
    WsErrorCode::Ok
}

/// The full report as JSON, or NULL on a NULL handle. Free with [`ws_string_free`].
///
/// # Safety
/// `handle` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_analysis_json(handle: *const WsAnalysis) -> *mut c_char {
    match handle.as_ref() {
        Some(a) => to_c_string(serde_json::to_string(&a.report).expect("reports serialize")),
        None => ptr::null_mut(),
    }
}

/// Runs the audit suites and stores the JSON report in `*out_json`.
/// Returns `WS_ERROR_CODE_INVARIANT` on a definite failure and
/// `WS_ERROR_CODE_PRECISION_EXHAUSTED` when every failure is indeterminate; the
/// report is produced in both cases.
///
/// # Safety
/// `params` must be NULL or valid; `out_json` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ws_audit(
    params: *const WsParams,
    sample: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> WsErrorCode {
    if out_json.is_null() {
        set_error("out_json is NULL");
        return WsErrorCode::InvalidArgument;
    }
    *out_json = ptr::null_mut();
    guard(|| {
        let cfg = config_from(params)?;
        let opts = RunOptions {
            sample: Some(sample),
            seed: Some(seed),
            fault: None,
        };
        let report = pipeline::audit(&cfg, &opts).map_err(lib_err)?;
        *out_json = to_c_string(serde_json::to_string(&report).expect("reports serialize"));
        let s = &report.summary;
        match (s.all_pass, s.failed == s.indeterminate) {
            (true, _) => Ok(()),
            (false, true) => Err((
                WsErrorCode::PrecisionExhausted,
                format!("{} checks indeterminate", s.failed),
            )),
            (false, false) => Err((WsErrorCode::Invariant, format!("{} checks failed", s.failed))),
        }
    })
}

/// Message of the most recent failure on this thread, or NULL. Free with [`ws_string_free`].
#[no_mangle]
pub extern "C" fn ws_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(ptr::null_mut(), to_c_string))
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
