//! C ABI for `waterbed`.
//!
//! Every fallible call returns a [`WbStatus`]. On failure the message is
//! available from [`wb_last_error`] on the same thread until the next
//! call. Handles are opaque and must be released with their `_free`
//! function. Complex arrays are interleaved `re, im` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use waterbed::cli::sysfile::{parse_system_file, LoadedSystem};
use waterbed::integrals::{
    identity_integral, waterbed_verify_with, LoopSystem, QuadratureConfig, StabilityVerdict, VerifyOptions,
};
use waterbed::{Complex64, Polynomial, RationalSystem, WaterbedError, WaterbedReport};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    Numerical = 3,
    NonConvergent = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbVerdict {
    OpenLoopStable = 0,
    OpenLoopUnstable = 1,
    ClosedLoopUnstable = 2,
}

/// Integral values from a report. Missing values are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WbIntegrals {
    pub numeric_s: f64,
    pub analytic_s: f64,
    pub discrepancy_s: f64,
    pub numeric_t: f64,
    pub analytic_t: f64,
    pub discrepancy_t: f64,
}

/// A loop gain, SISO or square MIMO.
pub struct WbSystem {
    inner: LoadedSystem,
}

/// Result of `wb_verify`.
pub struct WbReport {
    inner: WaterbedReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &WaterbedError) -> WbStatus {
    use WaterbedError::*;
    match e {
        Parse { .. }
        | Validation(_)
        | InvalidConfig(_)
        | Improper { .. }
        | ImproperEntry { .. }
        | NonSquare { .. }
        | DimensionMismatch(_)
        | ZeroDenominator
        | Io { .. } => WbStatus::InvalidInput,
        NonConvergent { .. } => WbStatus::NonConvergent,
        _ => WbStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (WbStatus, String)>) -> WbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WbStatus::Internal
        }
    }
}

fn fail(e: WaterbedError) -> (WbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (WbStatus, String) {
    (WbStatus::NullArgument, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (WbStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn complexes(p: *const f64, count: usize, what: &str) -> Result<Vec<Complex64>, (WbStatus, String)> {
    let len = count
        .checked_mul(2)
        .ok_or_else(|| (WbStatus::InvalidInput, format!("{what}: count overflows")))?;
    let flat = slice(p, len, what)?;
    Ok(flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn finite(values: &[f64], what: &str) -> Result<(), (WbStatus, String)> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err((WbStatus::InvalidInput, format!("{what}[{i}] is not finite"))),
        None => Ok(()),
    }
}

fn store<T>(out: *mut *mut T, value: T) -> Result<(), (WbStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn siso(l: RationalSystem) -> WbSystem {
    WbSystem {
        inner: LoadedSystem {
            system: LoopSystem::Siso(l),
            realization: None,
        },
    }
}

/// SISO loop gain from ascending-degree real coefficients.
///
/// # Safety
/// `num` and `den` must point to `num_len` and `den_len` readable doubles
/// (either may be null when its length is 0). `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_system_from_ratio(
    num: *const f64,
    num_len: usize,
    den: *const f64,
    den_len: usize,
    out: *mut *mut WbSystem,
) -> WbStatus {
    guard(|| {
        let num = slice(num, num_len, "num")?;
        let den = slice(den, den_len, "den")?;
        finite(num, "num")?;
        finite(den, "den")?;
        let l = RationalSystem::new(Polynomial::from_real(num), Polynomial::from_real(den)).map_err(fail)?;
        store(out, siso(l))
    })
}

/// SISO loop gain `k prod(z - z_i) / prod(z - p_i)`.
///
/// # Safety
/// `zeros` and `poles` must point to `2 * n_zeros` and `2 * n_poles`
/// readable doubles. `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_system_from_zpk(
    zeros: *const f64,
    n_zeros: usize,
    poles: *const f64,
    n_poles: usize,
    gain_re: f64,
    gain_im: f64,
    out: *mut *mut WbSystem,
) -> WbStatus {
    guard(|| {
        let z = complexes(zeros, n_zeros, "zeros")?;
        let p = complexes(poles, n_poles, "poles")?;
        let flat: Vec<f64> = z
            .iter()
            .chain(&p)
            .flat_map(|c| [c.re, c.im])
            .chain([gain_re, gain_im])
            .collect();
        finite(&flat, "zpk")?;
        if z.len() > p.len() {
            return Err((
                WbStatus::InvalidInput,
                format!("improper: {} zeros but only {} poles", z.len(), p.len()),
            ));
        }
        let l = RationalSystem::from_zpk(&z, &p, Complex64::new(gain_re, gain_im)).map_err(fail)?;
        store(out, siso(l))
    })
}

/// Any loop gain from the JSON system-file format.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string. `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_system_from_json(text: *const c_char, out: *mut *mut WbSystem) -> WbStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (WbStatus::InvalidInput, format!("text is not UTF-8: {e}")))?;
        let inner = parse_system_file(text).and_then(|f| f.load()).map_err(fail)?;
        store(out, WbSystem { inner })
    })
}

/// Number of loop channels (1 for SISO).
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_system_size(system: *const WbSystem) -> usize {
    match system.as_ref().map(|s| &s.inner.system) {
        Some(LoopSystem::Siso(_)) => 1,
        Some(LoopSystem::Mimo(m)) => m.size(),
        None => 0,
    }
}

/// # Safety
/// `system` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_system_free(system: *mut WbSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Sensitivity and complementary integrals with their predictions.
/// `quad_tol <= 0` selects the default quadrature tolerance.
///
/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_verify(system: *const WbSystem, quad_tol: f64, out: *mut *mut WbReport) -> WbStatus {
    guard(|| {
        let system = system.as_ref().ok_or_else(|| null("system"))?;
        let cfg = if quad_tol > 0.0 {
            QuadratureConfig::with_tol(quad_tol)
        } else {
            QuadratureConfig::default()
        };
        let opts = VerifyOptions {
            realization: system.inner.realization.clone(),
            ..VerifyOptions::default()
        };
        let inner = waterbed_verify_with(&system.inner.system, &cfg, &opts).map_err(fail)?;
        store(out, WbReport { inner })
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_report_free(report: *mut WbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_report_verdict(report: *const WbReport, out: *mut WbVerdict) -> WbStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match r.inner.stability_verdict {
            StabilityVerdict::Ols => WbVerdict::OpenLoopStable,
            StabilityVerdict::Olu => WbVerdict::OpenLoopUnstable,
            StabilityVerdict::ClosedLoopUnstable => WbVerdict::ClosedLoopUnstable,
        };
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_report_integrals(report: *const WbReport, out: *mut WbIntegrals) -> WbStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        *out = WbIntegrals {
            numeric_s: nan(r.numeric_s_integral.value()),
            analytic_s: nan(r.analytic_s),
            discrepancy_s: nan(r.discrepancies.s),
            numeric_t: nan(r.numeric_t_integral.value()),
            analytic_t: nan(r.analytic_t),
            discrepancy_t: nan(r.discrepancies.t),
        };
        Ok(())
    })
}

/// Writes 1 when every check passes at `tol`, else 0.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_report_passes(report: *const WbReport, tol: f64, out: *mut i32) -> WbStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = i32::from(r.inner.passes(tol));
        Ok(())
    })
}

/// Report as JSON. Release the string with `wb_string_free`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_report_to_json(report: *const WbReport, out: *mut *mut c_char) -> WbStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CString::new(r.inner.to_json()).map_err(|e| (WbStatus::Internal, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Closed form of the integral of `ln(1 - 2a cos x + a^2)` over a period.
#[no_mangle]
pub extern "C" fn wb_identity_integral(a: f64) -> f64 {
    identity_integral(a)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
