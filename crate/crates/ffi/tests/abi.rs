use std::ffi::{CStr, CString};
use std::ptr;

use waterbed_ffi::*;

fn last_error() -> String {
    let p = wb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn verify(system: *const WbSystem) -> *mut WbReport {
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { wb_verify(system, 0.0, &mut report) }, WbStatus::Ok);
    report
}

fn integrals(report: *const WbReport) -> WbIntegrals {
    let mut out = WbIntegrals {
        numeric_s: 0.0,
        analytic_s: 0.0,
        discrepancy_s: 0.0,
        numeric_t: 0.0,
        analytic_t: 0.0,
        discrepancy_t: 0.0,
    };
    assert_eq!(unsafe { wb_report_integrals(report, &mut out) }, WbStatus::Ok);
    out
}

#[test]
fn zpk_example2() {
    let zeros = [0.7, 0.0, -1.0, 0.0];
    let poles = [-0.5, 0.0, 0.8187, 0.0, 1.2214, 0.0];
    let mut sys = ptr::null_mut();
    let st = unsafe { wb_system_from_zpk(zeros.as_ptr(), 2, poles.as_ptr(), 3, 0.301, 0.0, &mut sys) };
    assert_eq!(st, WbStatus::Ok);
    assert_eq!(unsafe { wb_system_size(sys) }, 1);

    let report = verify(sys);
    let mut verdict = WbVerdict::OpenLoopStable;
    assert_eq!(unsafe { wb_report_verdict(report, &mut verdict) }, WbStatus::Ok);
    assert_eq!(verdict, WbVerdict::OpenLoopUnstable);
    let v = integrals(report);
    assert!((v.numeric_s - 1.2566).abs() < 1e-3);
    assert!((v.numeric_t + 7.5439).abs() < 1e-3);
    let mut passes = 0;
    assert_eq!(unsafe { wb_report_passes(report, 1e-3, &mut passes) }, WbStatus::Ok);
    assert_eq!(passes, 1);

    unsafe {
        wb_report_free(report);
        wb_system_free(sys);
    }
}

#[test]
fn ratio_and_json_report() {
    // L = 0.2 / (z - 0.5)
    let num = [0.2];
    let den = [-0.5, 1.0];
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { wb_system_from_ratio(num.as_ptr(), 1, den.as_ptr(), 2, &mut sys) },
        WbStatus::Ok
    );
    let report = verify(sys);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { wb_report_to_json(report, &mut json) }, WbStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["stability_verdict"], "OLS");
    unsafe {
        wb_string_free(json);
        wb_report_free(report);
        wb_system_free(sys);
    }
}

#[test]
fn mimo_from_json() {
    let text = CString::new(include_str!("../../core/fixtures/example3.json")).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { wb_system_from_json(text.as_ptr(), &mut sys) }, WbStatus::Ok);
    assert_eq!(unsafe { wb_system_size(sys) }, 2);
    let report = verify(sys);
    let v = integrals(report);
    assert!(v.numeric_s.abs() < 1e-3);
    assert!((v.analytic_t + 28.34).abs() < 1e-2);
    unsafe {
        wb_report_free(report);
        wb_system_free(sys);
    }
}

#[test]
fn unstable_loop_has_nan_integrals() {
    let num = [3.0];
    let den = [-0.5, 1.0];
    let mut sys = ptr::null_mut();
    unsafe { wb_system_from_ratio(num.as_ptr(), 1, den.as_ptr(), 2, &mut sys) };
    let report = verify(sys);
    let mut verdict = WbVerdict::OpenLoopStable;
    unsafe { wb_report_verdict(report, &mut verdict) };
    assert_eq!(verdict, WbVerdict::ClosedLoopUnstable);
    assert!(integrals(report).numeric_s.is_nan());
    unsafe {
        wb_report_free(report);
        wb_system_free(sys);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut sys = ptr::null_mut();
    let num = [0.0, 0.0, 1.0];
    let den = [1.0, 1.0];
    let st = unsafe { wb_system_from_ratio(num.as_ptr(), 3, den.as_ptr(), 2, &mut sys) };
    assert_eq!(st, WbStatus::InvalidInput);
    assert!(sys.is_null());
    assert!(last_error().contains("improper"));

    let st = unsafe { wb_system_from_ratio(ptr::null(), 2, den.as_ptr(), 2, &mut sys) };
    assert_eq!(st, WbStatus::NullArgument);
    assert!(last_error().contains("num"));

    let bad = CString::new("{\"kind\": \"siso_zpk\"").unwrap();
    assert_eq!(
        unsafe { wb_system_from_json(bad.as_ptr(), &mut sys) },
        WbStatus::InvalidInput
    );
    assert!(last_error().contains("line"));

    let nan = [f64::NAN];
    let st = unsafe { wb_system_from_ratio(nan.as_ptr(), 1, den.as_ptr(), 2, &mut sys) };
    assert_eq!(st, WbStatus::InvalidInput);

    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { wb_verify(ptr::null(), 0.0, &mut report) },
        WbStatus::NullArgument
    );

    // A successful call clears the message.
    assert_eq!(
        unsafe { wb_system_from_ratio(den.as_ptr(), 1, den.as_ptr(), 2, &mut sys) },
        WbStatus::Ok
    );
    assert!(wb_last_error().is_null());
    unsafe { wb_system_free(sys) };
}

#[test]
fn free_accepts_null() {
    unsafe {
        wb_system_free(ptr::null_mut());
        wb_report_free(ptr::null_mut());
        wb_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { wb_system_size(ptr::null()) }, 0);
}

#[test]
fn identity() {
    assert_eq!(wb_identity_integral(0.5), 0.0);
    assert!((wb_identity_integral(2.0) - 8.7104).abs() < 1e-4);
}
