use std::ffi::{CStr, CString};
use std::ptr;

use attenuwave_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(aw_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn model_lifecycle_and_alpha_star() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(aw_model_power_law(0.5, 1.0, 0.0, 1.0, &mut m), AwStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(aw_alpha_star(m, 1.0, &mut re, &mut im), AwStatus::Ok);
        // alpha = alpha0 |omega|^gamma at omega = 1
        assert!((re - 1.0).abs() < 1e-12);
        assert!((im + 1.0).abs() < 1e-12);
        aw_model_free(m);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(aw_model_szabo(1.0, 1.0, 1.0, &mut m), AwStatus::InvalidModel);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(aw_model_power_law(0.5, 1.0, 0.0, 1.0, ptr::null_mut()), AwStatus::NullPointer);
        let bad = CString::new("{\"kind\":\"Szabo\",\"gamma\":0.5}").unwrap();
        assert_eq!(aw_model_from_json(bad.as_ptr(), &mut m), AwStatus::Parse);
        assert!(last_error().contains("alpha0"), "{}", last_error());
    }
}

#[test]
fn certify_round_trip() {
    let json = CString::new("{\"kind\":\"Szabo\",\"gamma\":1.5,\"alpha0\":1.0,\"c0\":1.0}").unwrap();
    let mut m = ptr::null_mut();
    let mut r = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(aw_model_from_json(json.as_ptr(), &mut m), AwStatus::Ok);
        assert_eq!(aw_certify(m, &mut r), AwStatus::Ok);
        assert_eq!(aw_report_verdict(r), AwVerdict::Refuted);
        assert_eq!(aw_report_json(r, &mut s), AwStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["verdict"], "REFUTED");
        assert!(v["witness"].is_object());
        aw_string_free(s);
        aw_report_free(r);
        aw_model_free(m);
    }
}

#[test]
fn shell_samples() {
    let mut m = ptr::null_mut();
    let mut sig = ptr::null_mut();
    unsafe {
        assert_eq!(aw_model_power_law(0.5, 1.0, 0.0, 1.0, &mut m), AwStatus::Ok);
        assert_eq!(aw_synth_shell(m, 1.0, 1024, 2.0, &mut sig), AwStatus::Ok);
        let n = aw_signal_len(sig);
        assert_eq!(n, 1024);
        let x = std::slice::from_raw_parts(aw_signal_samples(sig), n);
        let dt = aw_signal_dt(sig);
        // DC value exp(-alpha*(0) r) = 1
        let sum: f64 = x.iter().sum::<f64>() * dt;
        assert!((sum - 1.0).abs() < 1e-10);
        assert!(aw_signal_floor(sig) >= 0.0);
        assert!(aw_signal_t0(sig) < 0.0);
        aw_signal_free(sig);
        assert_eq!(aw_synth_shell(m, 1.0, 100, 2.0, &mut sig), AwStatus::InvalidArgument);
        assert_eq!(aw_synth_shell(m, 1.0, 1024, 0.01, &mut sig), AwStatus::Numerical);
        aw_model_free(m);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/attenuwave.h")).unwrap();
    for name in [
        "aw_model_from_json",
        "aw_certify",
        "aw_report_json",
        "aw_synth_shell",
        "aw_last_error",
        "typedef struct AwModel AwModel",
    ] {
        assert!(h.contains(name), "{name}");
    }
}
