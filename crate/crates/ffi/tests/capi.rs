//! Exercises the C ABI exactly as a foreign caller would: opaque handles,
//! status codes, JSON strings, and the last-error channel.

use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use ecomet_ffi::*;

fn annual_csv_path() -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/annual.csv");
    CString::new(path.to_str().unwrap()).unwrap()
}

unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = CStr::from_ptr(ptr).to_str().unwrap().to_owned();
    ecomet_string_free(ptr);
    s
}

unsafe fn load_annual() -> *mut EcometDataset {
    let mut ds: *mut EcometDataset = ptr::null_mut();
    let status = ecomet_dataset_load_csv(annual_csv_path().as_ptr(), &mut ds);
    assert_eq!(status, EcometStatus::Ok);
    assert!(!ds.is_null());
    ds
}

#[test]
fn dataset_lifecycle_and_introspection() {
    unsafe {
        let ds = load_annual();
        assert_eq!(ecomet_dataset_observation_count(ds), 43);
        assert_eq!(ecomet_dataset_variable_count(ds), 6);
        let name = take_string(ecomet_dataset_variable_name(ds, 0));
        assert_eq!(name, "GPDI");
        assert!(ecomet_dataset_variable_name(ds, 99).is_null());
        ecomet_dataset_free(ds);
        ecomet_dataset_free(ptr::null_mut());
    }
}

#[test]
fn load_errors_set_status_and_message() {
    unsafe {
        let mut ds: *mut EcometDataset = ptr::null_mut();
        let missing = CString::new("/no/such/file.csv").unwrap();
        assert_eq!(
            ecomet_dataset_load_csv(missing.as_ptr(), &mut ds),
            EcometStatus::Io
        );
        let msg = take_string(ecomet_last_error_message());
        assert!(msg.contains("/no/such/file.csv"), "message: {msg}");

        assert_eq!(
            ecomet_dataset_load_csv(ptr::null(), &mut ds),
            EcometStatus::NullPointer
        );

        let bad = CString::new("DATE,A\n1990,1\n").unwrap();
        assert_eq!(
            ecomet_dataset_from_csv_text(bad.as_ptr(), &mut ds),
            EcometStatus::Parse
        );
    }
}

#[test]
fn correlation_matrix_json_round_trips() {
    unsafe {
        let ds = load_annual();
        let vars = CString::new("NYSE,DJ,SP500").unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        let status = ecomet_correlation_matrix_json(ds, vars.as_ptr(), &mut json);
        assert_eq!(status, EcometStatus::Ok);
        let payload: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(payload["variable_names"][1], "DJ");
        let r = payload["cells"][1][2]["r"].as_f64().unwrap();
        assert!((r - 0.998).abs() < 5e-4);

        // Null vars means all variables.
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ecomet_correlation_matrix_json(ds, ptr::null(), &mut json),
            EcometStatus::Ok
        );
        let payload: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(payload["variable_names"].as_array().unwrap().len(), 6);
        ecomet_dataset_free(ds);
    }
}

#[test]
fn regression_json_and_analysis_errors() {
    unsafe {
        let ds = load_annual();
        let dep = CString::new("GPDI").unwrap();
        let preds = CString::new("SP500,CPIU,TB3").unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ecomet_regression_json(ds, dep.as_ptr(), preds.as_ptr(), &mut json),
            EcometStatus::Ok
        );
        let payload: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(payload["n"], 43);
        assert_eq!(payload["coefficients"][0]["name"], "(Constant)");
        assert!(payload["summary"]["r_square"].as_f64().unwrap() > 0.9);

        let bad = CString::new("NOPE").unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ecomet_regression_json(ds, bad.as_ptr(), preds.as_ptr(), &mut json),
            EcometStatus::Analysis
        );
        let msg = take_string(ecomet_last_error_message());
        assert!(msg.contains("NOPE"), "message: {msg}");
        ecomet_dataset_free(ds);
    }
}

#[test]
fn staged_analysis_json_selects_expected_pair() {
    unsafe {
        let ds = load_annual();
        let indices = CString::new("NYSE,DJ,SP500").unwrap();
        let price = CString::new("CPIU").unwrap();
        let rate = CString::new("TB3").unwrap();
        let investment = CString::new("GPDI").unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        let status = ecomet_staged_analysis_json(
            ds,
            indices.as_ptr(),
            price.as_ptr(),
            rate.as_ptr(),
            investment.as_ptr(),
            &mut json,
        );
        assert_eq!(status, EcometStatus::Ok);
        let payload: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(payload["selected_index"], "SP500");
        assert_eq!(payload["index_pair"][0], "DJ");
        assert_eq!(payload["stages"].as_array().unwrap().len(), 4);
        ecomet_dataset_free(ds);
    }
}

#[test]
fn paper_verify_ok_and_checks_failed() {
    unsafe {
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ecomet_paper_verify_json(ptr::null(), &mut json),
            EcometStatus::Ok
        );
        let payload: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(payload["passed"], true);

        // A fixture missing most records still produces a report, with the
        // failure surfaced in the status code.
        let tiny = CString::new(
            "schema = 1\n\n[[value]]\nkey = \"data.n\"\ntable = \"T\"\nlabel = \"N\"\nvalue = 43.0\nresolution = 1.0\n",
        )
        .unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ecomet_paper_verify_json(tiny.as_ptr(), &mut json),
            EcometStatus::ChecksFailed
        );
        let payload: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(payload["passed"], false);
        let msg = take_string(ecomet_last_error_message());
        assert!(msg.contains("checks failed"), "message: {msg}");

        let garbage = CString::new("not toml at all [").unwrap();
        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            ecomet_paper_verify_json(garbage.as_ptr(), &mut json),
            EcometStatus::Parse
        );
    }
}

#[test]
fn tail_probability_helpers() {
    unsafe {
        let mut p = 0.0f64;
        assert_eq!(
            ecomet_f_upper_tail_p(5.303, 2, 40, &mut p),
            EcometStatus::Ok
        );
        assert!((p - 0.009).abs() < 0.001);
        assert_eq!(ecomet_t_two_tailed_p(3.170, 40, &mut p), EcometStatus::Ok);
        assert!((p - 0.003).abs() < 0.001);
        assert_eq!(
            ecomet_t_two_tailed_p(1.0, 0, &mut p),
            EcometStatus::Analysis
        );
        assert_eq!(
            ecomet_f_upper_tail_p(1.0, 2, 40, ptr::null_mut()),
            EcometStatus::NullPointer
        );
    }
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ecomet.h"),
    )
    .unwrap();
    for decl in [
        "typedef struct EcometDataset EcometDataset;",
        "ECOMET_STATUS_OK",
        "ECOMET_STATUS_CHECKS_FAILED",
        "ecomet_dataset_load_csv",
        "ecomet_correlation_matrix_json",
        "ecomet_regression_json",
        "ecomet_staged_analysis_json",
        "ecomet_paper_verify_json",
        "ecomet_string_free",
        "ecomet_last_error_message",
    ] {
        assert!(header.contains(decl), "header is missing {decl:?}");
    }
}
