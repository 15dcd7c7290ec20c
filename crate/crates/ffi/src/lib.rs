//! C ABI over `casimir-core`.
//!
//! Configs and results are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns a
//! [`CasimirStatus`]; on failure [`casimir_last_error`] describes the cause
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use casimir_core::error::Error;
use casimir_core::report::{evaluate, to_json, Mode, ResultRecord, RunConfig};
use casimir_core::units::CONSTANTS_VERSION;

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    UnknownPreset = 4,
    Config = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Run configuration handle.
pub struct CasimirConfig(RunConfig);

/// Evaluated result handle.
pub struct CasimirResult(ResultRecord);

/// Closed-form momenta (kg·m/s) and dimensionless diagnostics. Ratios are NaN
/// when E₀×B₀ vanishes.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CasimirClosedForm {
    pub classical: [f64; 3],
    pub casimir_k1: [f64; 3],
    pub casimir_k2: [f64; 3],
    pub k1_over_classical: f64,
    pub k2_over_classical: f64,
    pub doppler_bound: f64,
    pub anisotropy: f64,
}

/// Classical velocity |α(0)E₀B₀|/M under the SI and polarizability-volume readings (m/s).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CasimirVelocities {
    pub v_si: f64,
    pub v_volume: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CasimirStatus {
    match e {
        Error::InvalidParameter { .. } | Error::TooFewCutoffs { .. } => CasimirStatus::InvalidParameter,
        Error::UnknownPreset(_) => CasimirStatus::UnknownPreset,
        Error::Config(_) => CasimirStatus::Config,
        Error::Io(_) => CasimirStatus::Io,
        _ => CasimirStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), CasimirStatus>>(f: F) -> CasimirStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CasimirStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            CasimirStatus::Panic
        }
    }
}

fn fail(e: Error) -> CasimirStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, CasimirStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(CasimirStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CasimirStatus::InvalidUtf8
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), CasimirStatus> {
    if p.is_null() {
        set_error(&format!("null {what}"));
        return Err(CasimirStatus::NullPointer);
    }
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn casimir_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static string naming the physical-constants set.
#[no_mangle]
pub extern "C" fn casimir_constants_version() -> *const c_char {
    static V: &CStr = c"CODATA 2018";
    debug_assert_eq!(V.to_str().unwrap(), CONSTANTS_VERSION);
    V.as_ptr()
}

/// Creates a config from a preset name ("hydrogen", "equal-mass", "positronium-like").
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_config_preset(name: *const c_char, out: *mut *mut CasimirConfig) -> CasimirStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let c = RunConfig::preset(read_str(name)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(CasimirConfig(c)));
        Ok(())
    })
}

/// Parses config text in the CLI's `key = value` format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_config_parse(text: *const c_char, out: *mut *mut CasimirConfig) -> CasimirStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let c = RunConfig::parse(read_str(text)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(CasimirConfig(c)));
        Ok(())
    })
}

/// Sets the evaluation mode: "closed-form", "numeric", "oracle" or "scan".
///
/// # Safety
/// `config` must come from this library and `mode` be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn casimir_config_set_mode(config: *mut CasimirConfig, mode: *const c_char) -> CasimirStatus {
    guard(|| {
        non_null(config, "config")?;
        let m = Mode::parse(read_str(mode)?).map_err(fail)?;
        if m == Mode::Sweep {
            return Err(fail(Error::Config("sweeps are not available through this interface".into())));
        }
        (*config).0.mode = m;
        Ok(())
    })
}

/// Sets the static fields (V/m and T).
///
/// # Safety
/// `config` must come from this library; `e0` and `b0` must point to three doubles each.
#[no_mangle]
pub unsafe extern "C" fn casimir_config_set_fields(
    config: *mut CasimirConfig,
    e0: *const f64,
    b0: *const f64,
) -> CasimirStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(e0, "E0")?;
        non_null(b0, "B0")?;
        let (e, b) = (std::slice::from_raw_parts(e0, 3), std::slice::from_raw_parts(b0, 3));
        let mut c = (*config).0.clone();
        c.e0_vpm = nalgebra::Vector3::from_column_slice(e);
        c.b0_t = nalgebra::Vector3::from_column_slice(b);
        c.validate().map_err(fail)?;
        (*config).0 = c;
        Ok(())
    })
}

/// Releases a config. Null is accepted.
///
/// # Safety
/// `config` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn casimir_config_free(config: *mut CasimirConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Evaluates a config in its mode.
///
/// # Safety
/// `config` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_evaluate(config: *const CasimirConfig, out: *mut *mut CasimirResult) -> CasimirStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "output pointer")?;
        let r = evaluate(&(*config).0).map_err(fail)?;
        *out = Box::into_raw(Box::new(CasimirResult(r)));
        Ok(())
    })
}

/// Copies the closed-form block of a result.
///
/// # Safety
/// `result` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_closed_form(
    result: *const CasimirResult,
    out: *mut CasimirClosedForm,
) -> CasimirStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "output pointer")?;
        let cf = &(*result).0.closed_form;
        let arr = |v: &nalgebra::Vector3<f64>| [v.x, v.y, v.z];
        *out = CasimirClosedForm {
            classical: arr(&cf.classical),
            casimir_k1: arr(&cf.casimir_k1),
            casimir_k2: arr(&cf.casimir_k2),
            k1_over_classical: cf.k1_over_classical.as_ref().map_or(f64::NAN, |r| r.fraction),
            k2_over_classical: cf.k2_over_classical.as_ref().map_or(f64::NAN, |r| r.fraction),
            doppler_bound: cf.doppler_bound,
            anisotropy: cf.anisotropy,
        };
        Ok(())
    })
}

/// Copies the classical velocity under both polarizability conventions.
///
/// # Safety
/// `result` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_velocities(
    result: *const CasimirResult,
    out: *mut CasimirVelocities,
) -> CasimirStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "output pointer")?;
        let c = &(*result).0.conventions;
        *out = CasimirVelocities { v_si: c.v_si, v_volume: c.v_volume };
        Ok(())
    })
}

/// Renormalized E₀×B₀ momentum from the numeric engine (kg·m/s); requires mode "numeric".
///
/// # Safety
/// `result` must come from this library and `out` point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_renormalized(result: *const CasimirResult, out: *mut f64) -> CasimirStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "output pointer")?;
        let n = (*result).0.numeric.as_ref().ok_or_else(|| {
            fail(Error::Config("result was not evaluated in numeric mode".into()))
        })?;
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(n.exb_renormalized.as_slice());
        Ok(())
    })
}

/// The full result as JSON. Release with [`casimir_string_free`].
///
/// # Safety
/// `result` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_json(result: *const CasimirResult, out: *mut *mut c_char) -> CasimirStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "output pointer")?;
        let s = to_json(&(*result).0).map_err(fail)?;
        *out = CString::new(s).map_err(|_| fail(Error::Io("JSON contains NUL".into())))?.into_raw();
        Ok(())
    })
}

/// Releases a result. Null is accepted.
///
/// # Safety
/// `result` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn casimir_result_free(result: *mut CasimirResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Releases a string returned by this library. Null is accepted.
///
/// # Safety
/// `s` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn casimir_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
