//! C ABI for the ecomet analysis engine.
//!
//! Datasets travel as opaque handles; results travel as JSON strings the
//! caller frees with [`ecomet_string_free`]. Every fallible call returns an
//! [`EcometStatus`]; on failure, [`ecomet_last_error_message`] yields a
//! human-readable description for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ecomet::dataset::{self, Dataset, DatasetError, LoadOptions};
use ecomet::descriptive;
use ecomet::inference;
use ecomet::ols;
use ecomet::workflow::{self, PaperFixture, StageConfig};

/// Result of a C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcometStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input file could not be read.
    Io = 3,
    /// The input could not be parsed.
    Parse = 4,
    /// The computation rejected its inputs (unknown variable, rank
    /// deficiency, domain error, ...).
    Analysis = 5,
    /// The consistency suite ran and at least one check failed.
    ChecksFailed = 6,
}

/// Opaque dataset handle created by the load functions and released with
/// [`ecomet_dataset_free`].
pub struct EcometDataset {
    inner: Dataset,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let cstring = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(cstring));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn dataset_status(err: &DatasetError) -> EcometStatus {
    match err {
        DatasetError::UnreadableFile { .. } => EcometStatus::Io,
        DatasetError::MalformedHeader { .. }
        | DatasetError::NonNumericCell { .. }
        | DatasetError::RaggedRow { .. }
        | DatasetError::EmptyAfterDeletion
        | DatasetError::UnorderedYears { .. } => EcometStatus::Parse,
        _ => EcometStatus::Analysis,
    }
}

fn fail(status: EcometStatus, err: impl std::fmt::Display) -> EcometStatus {
    set_error(err.to_string());
    status
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn utf8_in<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, EcometStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is null"));
        return Err(EcometStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        EcometStatus::InvalidUtf8
    })
}

fn string_out(s: String, out: *mut *mut c_char) -> EcometStatus {
    if out.is_null() {
        return fail(EcometStatus::NullPointer, "out pointer is null");
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            EcometStatus::Ok
        }
        Err(_) => fail(EcometStatus::Analysis, "result contained an interior NUL"),
    }
}

fn dataset_out(ds: Dataset, out: *mut *mut EcometDataset) -> EcometStatus {
    if out.is_null() {
        return fail(EcometStatus::NullPointer, "out pointer is null");
    }
    let handle = Box::new(EcometDataset { inner: ds });
    unsafe { *out = Box::into_raw(handle) };
    clear_error();
    EcometStatus::Ok
}

fn split_names(csv: &str) -> Vec<String> {
    csv.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Loads an aligned dataset from a CSV file (first column YEAR, remaining
/// columns variables; empty cells trigger listwise deletion).
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. On `ECOMET_STATUS_OK`, `*out` owns the dataset and must be
/// released with [`ecomet_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn ecomet_dataset_load_csv(
    path: *const c_char,
    out: *mut *mut EcometDataset,
) -> EcometStatus {
    let path = match utf8_in(path, "path") {
        Ok(p) => p,
        Err(status) => return status,
    };
    match dataset::load_csv(path, &LoadOptions::default()) {
        Ok(load) => dataset_out(load.dataset, out),
        Err(e) => fail(dataset_status(&e), e),
    }
}

/// Loads an aligned dataset from CSV text.
///
/// # Safety
/// Same contract as [`ecomet_dataset_load_csv`], with `text` holding the CSV
/// content itself.
#[no_mangle]
pub unsafe extern "C" fn ecomet_dataset_from_csv_text(
    text: *const c_char,
    out: *mut *mut EcometDataset,
) -> EcometStatus {
    let text = match utf8_in(text, "text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    match dataset::load_csv_str(text, &LoadOptions::default()) {
        Ok(load) => dataset_out(load.dataset, out),
        Err(e) => fail(dataset_status(&e), e),
    }
}

/// Releases a dataset handle. Null is ignored.
///
/// # Safety
/// `ds` must be null or a pointer previously returned by a load function and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecomet_dataset_free(ds: *mut EcometDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of observations (rows); 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a valid dataset handle.
#[no_mangle]
pub unsafe extern "C" fn ecomet_dataset_observation_count(ds: *const EcometDataset) -> usize {
    ds.as_ref().map(|d| d.inner.n()).unwrap_or(0)
}

/// Number of variables; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a valid dataset handle.
#[no_mangle]
pub unsafe extern "C" fn ecomet_dataset_variable_count(ds: *const EcometDataset) -> usize {
    ds.as_ref().map(|d| d.inner.variables().len()).unwrap_or(0)
}

/// Name of the variable at `index`, or null when out of range. The caller
/// frees the string with [`ecomet_string_free`].
///
/// # Safety
/// `ds` must be null or a valid dataset handle.
#[no_mangle]
pub unsafe extern "C" fn ecomet_dataset_variable_name(
    ds: *const EcometDataset,
    index: usize,
) -> *mut c_char {
    let Some(ds) = ds.as_ref() else {
        return ptr::null_mut();
    };
    match ds.inner.variables().get(index) {
        Some(s) => CString::new(s.name()).map(CString::into_raw).unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    }
}

/// Pairwise correlation matrix as JSON. `vars_csv` is a comma-separated list
/// of variable names, or null for all variables.
///
/// # Safety
/// `ds` must be a valid dataset handle; `vars_csv` null or a valid string;
/// `out_json` a valid pointer. On `ECOMET_STATUS_OK` the caller frees
/// `*out_json` with [`ecomet_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ecomet_correlation_matrix_json(
    ds: *const EcometDataset,
    vars_csv: *const c_char,
    out_json: *mut *mut c_char,
) -> EcometStatus {
    let Some(ds) = ds.as_ref() else {
        return fail(EcometStatus::NullPointer, "dataset handle is null");
    };
    let names = if vars_csv.is_null() {
        ds.inner.variable_names()
    } else {
        match utf8_in(vars_csv, "vars_csv") {
            Ok(s) => split_names(s),
            Err(status) => return status,
        }
    };
    match descriptive::correlation_matrix(&ds.inner, &names) {
        Ok(matrix) => match serde_json::to_string(&matrix) {
            Ok(json) => {
                clear_error();
                string_out(json, out_json)
            }
            Err(e) => fail(EcometStatus::Analysis, e),
        },
        Err(e) => fail(EcometStatus::Analysis, e),
    }
}

/// Fits `dependent ~ (Constant) + predictors` and returns the model as JSON.
///
/// # Safety
/// `ds` must be a valid dataset handle; `dependent` and `predictors_csv`
/// valid strings; `out_json` a valid pointer (freed by the caller).
#[no_mangle]
pub unsafe extern "C" fn ecomet_regression_json(
    ds: *const EcometDataset,
    dependent: *const c_char,
    predictors_csv: *const c_char,
    out_json: *mut *mut c_char,
) -> EcometStatus {
    let Some(ds) = ds.as_ref() else {
        return fail(EcometStatus::NullPointer, "dataset handle is null");
    };
    let dependent = match utf8_in(dependent, "dependent") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let predictors = match utf8_in(predictors_csv, "predictors_csv") {
        Ok(s) => split_names(s),
        Err(status) => return status,
    };
    match ols::fit(&ds.inner, dependent, &predictors) {
        Ok(model) => match serde_json::to_string(&model) {
            Ok(json) => {
                clear_error();
                string_out(json, out_json)
            }
            Err(e) => fail(EcometStatus::Analysis, e),
        },
        Err(e) => fail(EcometStatus::Analysis, e),
    }
}

/// Runs the staged analysis (index screen, price link, rate model,
/// investment model) and returns the full result as JSON.
///
/// # Safety
/// `ds` must be a valid dataset handle; the name arguments valid strings;
/// `out_json` a valid pointer (freed by the caller).
#[no_mangle]
pub unsafe extern "C" fn ecomet_staged_analysis_json(
    ds: *const EcometDataset,
    indices_csv: *const c_char,
    price: *const c_char,
    rate: *const c_char,
    investment: *const c_char,
    out_json: *mut *mut c_char,
) -> EcometStatus {
    let Some(ds) = ds.as_ref() else {
        return fail(EcometStatus::NullPointer, "dataset handle is null");
    };
    let config = StageConfig {
        indices: match utf8_in(indices_csv, "indices_csv") {
            Ok(s) => split_names(s),
            Err(status) => return status,
        },
        price: match utf8_in(price, "price") {
            Ok(s) => s.to_string(),
            Err(status) => return status,
        },
        rate: match utf8_in(rate, "rate") {
            Ok(s) => s.to_string(),
            Err(status) => return status,
        },
        investment: match utf8_in(investment, "investment") {
            Ok(s) => s.to_string(),
            Err(status) => return status,
        },
    };
    match workflow::run_staged_analysis(&ds.inner, &config) {
        Ok(analysis) => match serde_json::to_string(&analysis) {
            Ok(json) => {
                clear_error();
                string_out(json, out_json)
            }
            Err(e) => fail(EcometStatus::Analysis, e),
        },
        Err(e) => fail(EcometStatus::Analysis, e),
    }
}

/// Runs the published-statistics consistency suite. `fixture_toml` is TOML
/// text for an alternate fixture, or null for the bundled one. Writes the
/// check report JSON either way; returns `ECOMET_STATUS_CHECKS_FAILED` when
/// any check fails.
///
/// # Safety
/// `fixture_toml` must be null or a valid string; `out_json` a valid pointer
/// (freed by the caller).
#[no_mangle]
pub unsafe extern "C" fn ecomet_paper_verify_json(
    fixture_toml: *const c_char,
    out_json: *mut *mut c_char,
) -> EcometStatus {
    let fixture = if fixture_toml.is_null() {
        PaperFixture::bundled()
    } else {
        let text = match utf8_in(fixture_toml, "fixture_toml") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match PaperFixture::from_toml_str(text) {
            Ok(f) => f,
            Err(e) => return fail(EcometStatus::Parse, e),
        }
    };
    let checks = workflow::paper_consistency_suite(&fixture);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let payload = serde_json::json!({
        "passed": failed == 0,
        "total": checks.len(),
        "failed": failed,
        "checks": checks,
    });
    let json = match serde_json::to_string(&payload) {
        Ok(j) => j,
        Err(e) => return fail(EcometStatus::Analysis, e),
    };
    let status = string_out(json, out_json);
    if status != EcometStatus::Ok {
        return status;
    }
    if failed == 0 {
        clear_error();
        EcometStatus::Ok
    } else {
        set_error(format!("{failed} of {} checks failed", checks.len()));
        EcometStatus::ChecksFailed
    }
}

/// Two-tailed p-value of a t statistic.
///
/// # Safety
/// `out_p` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecomet_t_two_tailed_p(t: f64, df: u64, out_p: *mut f64) -> EcometStatus {
    if out_p.is_null() {
        return fail(EcometStatus::NullPointer, "out_p is null");
    }
    match inference::t_two_tailed_p(t, df) {
        Ok(p) => {
            *out_p = p;
            clear_error();
            EcometStatus::Ok
        }
        Err(e) => fail(EcometStatus::Analysis, e),
    }
}

/// Upper-tail p-value of an F statistic.
///
/// # Safety
/// `out_p` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecomet_f_upper_tail_p(
    f: f64,
    df1: u64,
    df2: u64,
    out_p: *mut f64,
) -> EcometStatus {
    if out_p.is_null() {
        return fail(EcometStatus::NullPointer, "out_p is null");
    }
    match inference::f_upper_tail_p(f, df1, df2) {
        Ok(p) => {
            *out_p = p;
            clear_error();
            EcometStatus::Ok
        }
        Err(e) => fail(EcometStatus::Analysis, e),
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string pointer returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn ecomet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The calling thread's last error message (empty string when none). The
/// caller frees it with [`ecomet_string_free`].
#[no_mangle]
pub extern "C" fn ecomet_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        let msg = e
            .borrow()
            .as_ref()
            .map(|c| c.clone())
            .unwrap_or_default();
        msg.into_raw()
    })
}
