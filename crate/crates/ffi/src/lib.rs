//! C ABI for attenuwave.
//!
//! Objects are opaque handles released with their `*_free` function. Every
//! fallible call returns an [`AwStatus`]; on failure the message is available
//! from [`aw_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use attenuwave::certify::{certify, CausalityReport, HalfPlaneScan, Verdict, DEFAULT_CR_TOL};
use attenuwave::synth::synth_shell;
use attenuwave::{Error, FrequencyGrid, ModelSpec, TimeSignal};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidModel = 2,
    InvalidArgument = 3,
    Domain = 4,
    Numerical = 5,
    Parse = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwVerdict {
    CertifiedCausal = 0,
    Refuted = 1,
    Inconclusive = 2,
}

/// Dispersion model.
pub struct AwModel(ModelSpec);

/// Causality report.
pub struct AwReport(CausalityReport);

/// Sampled time signal.
pub struct AwSignal(TimeSignal);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> AwStatus {
    match e {
        Error::InvalidModel(_) => AwStatus::InvalidModel,
        Error::InvalidArgument(_) | Error::GridMismatch(_) | Error::InvalidCauchyData(_) => AwStatus::InvalidArgument,
        Error::Domain(_) | Error::BranchCut(_) => AwStatus::Domain,
        Error::Config(_) => AwStatus::Parse,
        _ => AwStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), AwStatus>) -> AwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AwStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            AwStatus::Panic
        }
    }
}

fn check<T>(r: attenuwave::Result<T>) -> Result<T, AwStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T) -> Result<(), AwStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        Err(AwStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn put<T>(out: *mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

/// Message of the last failure on this thread; empty if none. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn aw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Model from its flat JSON record, e.g. `{"kind":"Szabo","gamma":0.5,"alpha0":1,"c0":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aw_model_from_json(json: *const c_char, out: *mut *mut AwModel) -> AwStatus {
    guard(|| {
        non_null(json)?;
        non_null(out)?;
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            set_error(&e.to_string());
            AwStatus::Parse
        })?;
        let m: ModelSpec = serde_json::from_str(text).map_err(|e| {
            set_error(&e.to_string());
            AwStatus::Parse
        })?;
        put(out, AwModel(m));
        Ok(())
    })
}

unsafe fn new_model(out: *mut *mut AwModel, m: attenuwave::Result<ModelSpec>) -> AwStatus {
    guard(|| {
        non_null(out)?;
        put(out, AwModel(check(m)?));
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aw_model_power_law(
    gamma: f64,
    alpha0: f64,
    omega0: f64,
    c0: f64,
    out: *mut *mut AwModel,
) -> AwStatus {
    new_model(out, ModelSpec::power_law(gamma, alpha0, omega0, c0))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aw_model_szabo(gamma: f64, alpha0: f64, c0: f64, out: *mut *mut AwModel) -> AwStatus {
    new_model(out, ModelSpec::szabo(gamma, alpha0, c0))
}

/// `c1` is the trial bound speed.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aw_model_thermo_viscous(tau0: f64, c0: f64, c1: f64, out: *mut *mut AwModel) -> AwStatus {
    new_model(out, ModelSpec::thermo_viscous(tau0, c0, c1))
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aw_model_kowar_modified(
    gamma: f64,
    tau0: f64,
    c0: f64,
    c1: f64,
    out: *mut *mut AwModel,
) -> AwStatus {
    new_model(out, ModelSpec::kowar_modified(gamma, tau0, c0, c1))
}

/// # Safety
/// `model` must come from an `aw_model_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn aw_model_free(model: *mut AwModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `alpha*(omega)` at real `omega`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_alpha_star(model: *const AwModel, omega: f64, re: *mut f64, im: *mut f64) -> AwStatus {
    guard(|| {
        non_null(model)?;
        non_null(re)?;
        non_null(im)?;
        if !omega.is_finite() {
            set_error("omega must be finite");
            return Err(AwStatus::InvalidArgument);
        }
        let a = (*model).0.alpha_star_real(omega);
        *re = a.re;
        *im = a.im;
        Ok(())
    })
}

/// Certify with the model's standard scan and the default CR tolerance.
///
/// # Safety
/// `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_certify(model: *const AwModel, out: *mut *mut AwReport) -> AwStatus {
    guard(|| {
        non_null(model)?;
        non_null(out)?;
        let m = &(*model).0;
        let report = check(certify(m, &HalfPlaneScan::for_model(m), DEFAULT_CR_TOL))?;
        put(out, AwReport(report));
        Ok(())
    })
}

/// # Safety
/// `report` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_report_verdict(report: *const AwReport) -> AwVerdict {
    match (*report).0.verdict {
        Verdict::CertifiedCausal => AwVerdict::CertifiedCausal,
        Verdict::Refuted => AwVerdict::Refuted,
        Verdict::Inconclusive => AwVerdict::Inconclusive,
    }
}

/// JSON form of the report; release with [`aw_string_free`].
///
/// # Safety
/// `report` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_report_json(report: *const AwReport, out: *mut *mut c_char) -> AwStatus {
    guard(|| {
        non_null(report)?;
        non_null(out)?;
        let s = CString::new((*report).0.to_json()).map_err(|_| AwStatus::Numerical)?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`aw_certify`] or be null.
#[no_mangle]
pub unsafe extern "C" fn aw_report_free(report: *mut AwReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn aw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Shifted Green shell at radius `r` on the grid `(n, domega)`.
///
/// # Safety
/// `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_synth_shell(
    model: *const AwModel,
    r: f64,
    n: usize,
    domega: f64,
    out: *mut *mut AwSignal,
) -> AwStatus {
    guard(|| {
        non_null(model)?;
        non_null(out)?;
        let grid = check(FrequencyGrid::new(n, domega))?;
        let s = check(synth_shell(&(*model).0, r, &grid))?;
        put(out, AwSignal(s));
        Ok(())
    })
}

/// # Safety
/// `signal` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_signal_len(signal: *const AwSignal) -> usize {
    (*signal).0.len()
}

/// # Safety
/// `signal` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_signal_t0(signal: *const AwSignal) -> f64 {
    (*signal).0.t0
}

/// # Safety
/// `signal` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_signal_dt(signal: *const AwSignal) -> f64 {
    (*signal).0.dt
}

/// Numerical floor recorded during synthesis.
///
/// # Safety
/// `signal` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aw_signal_floor(signal: *const AwSignal) -> f64 {
    (*signal).0.floor
}

/// Borrowed sample buffer of length [`aw_signal_len`], valid while `signal` lives.
///
/// # Safety
/// `signal` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn aw_signal_samples(signal: *const AwSignal) -> *const f64 {
    if signal.is_null() {
        ptr::null()
    } else {
        (*signal).0.samples.as_ptr()
    }
}

/// # Safety
/// `signal` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn aw_signal_free(signal: *mut AwSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}
