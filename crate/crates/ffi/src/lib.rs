//! C ABI for the punctuation-restoration engine.
//!
//! Handles are opaque; every fallible call returns an [`FpodStatus`] and
//! reports results through out-pointers. Strings returned through out
//! parameters are heap-allocated and must be released with
//! [`fpod_string_free`]. On failure, [`fpod_last_error_message`] returns a
//! thread-local description of the most recent error.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use libc::c_char;

use fpod::config::Config;
use fpod::engine::{DecoderKind, Engine};
use fpod::eval::{estimate_eta, expected_tokens, improvement_factor};
use fpod::model::{NGramModel, OracleModel, RemoteModel};
use fpod::token::PunctuationSet;
use fpod::window::WindowSpec;

/// Result codes for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpodStatus {
    Ok = 0,
    /// A pointer argument was null or a parameter was out of range.
    InvalidArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Building or loading the model failed.
    ModelError = 3,
    /// Decoding failed.
    DecodeError = 4,
}

/// Decode cost counters mirrored from the Rust result type.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FpodCounters {
    pub passes: u64,
    pub full_forward_calls: u64,
    pub step_calls: u64,
    pub inserted_puncts: u64,
    pub deleted_spaces: u64,
}

/// Opaque engine handle: a model plus template, window, and recursion
/// settings.
pub struct FpodEngine {
    engine: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() =
            Some(CString::new(message).unwrap_or_else(|_| {
                CString::new("invalid error text").expect("static text has no NUL")
            }));
    });
}

fn fail(status: FpodStatus, message: impl Into<String>) -> FpodStatus {
    set_error(message);
    status
}

/// Message for the most recent failure on this thread, or null. The pointer
/// is valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fpod_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.as_ptr(),
        None => ptr::null(),
    })
}

unsafe fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, FpodStatus> {
    if ptr.is_null() {
        return Err(fail(FpodStatus::InvalidArgument, format!("{what} must not be null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(FpodStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn install(engine: Engine, out: *mut *mut FpodEngine) -> FpodStatus {
    let handle = Box::new(FpodEngine { engine });
    unsafe { *out = Box::into_raw(handle) };
    FpodStatus::Ok
}

/// Create an engine around a persisted n-gram model file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_from_ngram_file(
    path: *const c_char,
    out: *mut *mut FpodEngine,
) -> FpodStatus {
    if out.is_null() {
        return fail(FpodStatus::InvalidArgument, "out must not be null");
    }
    let path = match required_str(path, "path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config = Config::default();
    match NGramModel::load(Path::new(path)) {
        Ok(model) => install(Engine::new(Box::new(model), &config), out),
        Err(err) => fail(FpodStatus::ModelError, err.to_string()),
    }
}

/// Create an engine around a lookup oracle built from a punctuated corpus
/// file (one JSON object per line with a "reference" field).
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_from_corpus_oracle(
    path: *const c_char,
    context_order: usize,
    out: *mut *mut FpodEngine,
) -> FpodStatus {
    if out.is_null() {
        return fail(FpodStatus::InvalidArgument, "out must not be null");
    }
    let path = match required_str(path, "path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config = Config::default();
    let corpus = match fpod::eval::load_corpus(
        Path::new(path),
        &config.puncts,
        fpod::eval::Strictness::Lenient,
    ) {
        Ok(corpus) => corpus,
        Err(err) => return fail(FpodStatus::ModelError, err.to_string()),
    };
    let texts = fpod::eval::reference_texts(&corpus.pairs);
    match OracleModel::from_corpus(&texts, context_order.max(1), &config.puncts) {
        Ok(model) => install(Engine::new(Box::new(model), &config), out),
        Err(err) => fail(FpodStatus::ModelError, err.to_string()),
    }
}

/// Create an engine around a remote model server (newline-delimited JSON
/// over TCP at `addr`, e.g. "127.0.0.1:9000").
///
/// # Safety
/// `addr` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_from_remote(
    addr: *const c_char,
    out: *mut *mut FpodEngine,
) -> FpodStatus {
    if out.is_null() {
        return fail(FpodStatus::InvalidArgument, "out must not be null");
    }
    let addr = match required_str(addr, "addr") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config = Config::default();
    let model = RemoteModel::connect(addr, config.puncts.clone());
    install(Engine::new(Box::new(model), &config), out)
}

/// Release an engine. Null is ignored.
///
/// # Safety
/// `engine` must have come from an `fpod_engine_*` constructor and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_free(engine: *mut FpodEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Cap the number of recursive decoding passes (minimum 1).
///
/// # Safety
/// `engine` must be a live engine handle.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_set_max_passes(
    engine: *mut FpodEngine,
    max_passes: u64,
) -> FpodStatus {
    let Some(handle) = engine.as_mut() else {
        return fail(FpodStatus::InvalidArgument, "engine must not be null");
    };
    handle.engine.policy.max_passes = max_passes.max(1);
    FpodStatus::Ok
}

/// Set the sliding-window geometry (core length >= 1, pad per side).
///
/// # Safety
/// `engine` must be a live engine handle.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_set_window(
    engine: *mut FpodEngine,
    core_len: usize,
    pad_len: usize,
) -> FpodStatus {
    let Some(handle) = engine.as_mut() else {
        return fail(FpodStatus::InvalidArgument, "engine must not be null");
    };
    if core_len == 0 {
        return fail(FpodStatus::InvalidArgument, "core_len must be at least 1");
    }
    handle.engine.window = WindowSpec::new(core_len, pad_len);
    FpodStatus::Ok
}

/// Replace the punctuation set, e.g. ",.?!".
///
/// # Safety
/// `engine` must be a live engine handle and `marks` a valid string.
#[no_mangle]
pub unsafe extern "C" fn fpod_engine_set_puncts(
    engine: *mut FpodEngine,
    marks: *const c_char,
) -> FpodStatus {
    let Some(handle) = engine.as_mut() else {
        return fail(FpodStatus::InvalidArgument, "engine must not be null");
    };
    let marks = match required_str(marks, "marks") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match PunctuationSet::parse(marks) {
        Ok(puncts) => {
            handle.engine.puncts = puncts;
            FpodStatus::Ok
        }
        Err(err) => fail(FpodStatus::InvalidArgument, err.to_string()),
    }
}

/// Restore punctuation with recursive windowed forward-pass decoding.
/// `out_text` receives a heap string (free with [`fpod_string_free`]);
/// `out_counters` may be null.
///
/// # Safety
/// `engine` must be a live engine handle, `text` a valid NUL-terminated
/// string, and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpod_restore(
    engine: *const FpodEngine,
    text: *const c_char,
    out_text: *mut *mut c_char,
    out_counters: *mut FpodCounters,
) -> FpodStatus {
    let Some(handle) = engine.as_ref() else {
        return fail(FpodStatus::InvalidArgument, "engine must not be null");
    };
    if out_text.is_null() {
        return fail(FpodStatus::InvalidArgument, "out_text must not be null");
    }
    let text = match required_str(text, "text") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match handle.engine.restore(DecoderKind::RecursiveFpod, None, text) {
        Ok((restored, result)) => {
            let Ok(restored) = CString::new(restored) else {
                return fail(FpodStatus::DecodeError, "restored text contains a NUL byte");
            };
            *out_text = restored.into_raw();
            if let Some(counters) = out_counters.as_mut() {
                *counters = FpodCounters {
                    passes: result.passes,
                    full_forward_calls: result.full_forward_calls,
                    step_calls: result.step_calls,
                    inserted_puncts: result.inserted_puncts,
                    deleted_spaces: result.deleted_spaces,
                };
            }
            FpodStatus::Ok
        }
        Err(err) => fail(FpodStatus::DecodeError, err.to_string()),
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must have been returned through an out parameter of this library
/// and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fpod_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

fn write_out(value: Result<f64, fpod::eval::AnalyticsError>, out: *mut f64) -> FpodStatus {
    if out.is_null() {
        return fail(FpodStatus::InvalidArgument, "out must not be null");
    }
    match value {
        Ok(v) => {
            unsafe { *out = v };
            FpodStatus::Ok
        }
        Err(err) => fail(FpodStatus::InvalidArgument, err.to_string()),
    }
}

/// Expected tokens produced by one recursive decode over a window of
/// `window` tokens at acceptance rate `alpha`: (1 - alpha^L) / (1 - alpha).
#[no_mangle]
pub extern "C" fn fpod_expected_tokens(alpha: f64, window: u32, out: *mut f64) -> FpodStatus {
    write_out(expected_tokens(alpha, window), out)
}

/// Expected speedup over sequential generation: eta * expected tokens.
#[no_mangle]
pub extern "C" fn fpod_improvement_factor(
    alpha: f64,
    eta: f64,
    window: u32,
    out: *mut f64,
) -> FpodStatus {
    write_out(improvement_factor(alpha, eta, window), out)
}

/// Back out the time-efficiency factor from a measured speedup.
#[no_mangle]
pub extern "C" fn fpod_estimate_eta(
    measured_if: f64,
    alpha: f64,
    window: u32,
    out: *mut f64,
) -> FpodStatus {
    write_out(estimate_eta(measured_if, alpha, window), out)
}
