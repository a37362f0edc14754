//! C ABI over the `trapdyn` core.
//!
//! Every entry point returns a `TrapdynStatus`. On failure the message is
//! kept in a thread-local slot and read back with `trapdyn_last_error`.
//! Models are opaque handles owned by the caller and released with
//! `trapdyn_model_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use trapdyn::calib::{j22_local, CalibrationPreset};
use trapdyn::config::RunConfig;
use trapdyn::flow::{integrate, Direction, IntegrateOptions};
use trapdyn::localdyn::{eigen2, jacobian, Classification, EigenReport, Eigenvalues, Jacobian2};
use trapdyn::steady::{trap_and_target, ScanOptions, SteadyState};
use trapdyn::{presets, Error, Model, StateVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    InvalidParams = 4,
    Domain = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapdynClassification {
    Saddle = 0,
    StableNode = 1,
    UnstableNode = 2,
    StableSpiral = 3,
    UnstableSpiral = 4,
    Degenerate = 5,
}

impl From<Classification> for TrapdynClassification {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Saddle => TrapdynClassification::Saddle,
            Classification::StableNode => TrapdynClassification::StableNode,
            Classification::UnstableNode => TrapdynClassification::UnstableNode,
            Classification::StableSpiral => TrapdynClassification::StableSpiral,
            Classification::UnstableSpiral => TrapdynClassification::UnstableSpiral,
            Classification::Degenerate => TrapdynClassification::Degenerate,
        }
    }
}

/// Opaque model handle.
pub struct TrapdynModel {
    model: Model,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrapdynSteadyState {
    pub a: f64,
    pub pi: f64,
    pub nominal_rate: f64,
    pub residual: f64,
}

impl From<&SteadyState> for TrapdynSteadyState {
    fn from(s: &SteadyState) -> Self {
        TrapdynSteadyState {
            a: s.a,
            pi: s.pi,
            nominal_rate: s.nominal_rate,
            residual: s.residual,
        }
    }
}

/// Roots are `re1 + i·im1` and `re2 + i·im2`. Real roots have zero
/// imaginary parts and `re1 <= re2`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapdynEigen {
    pub trace: f64,
    pub determinant: f64,
    pub discriminant: f64,
    pub re1: f64,
    pub im1: f64,
    pub re2: f64,
    pub im2: f64,
    pub classification: TrapdynClassification,
}

impl From<&EigenReport> for TrapdynEigen {
    fn from(e: &EigenReport) -> Self {
        let (re1, im1, re2, im2) = match e.eigenvalues {
            Eigenvalues::Real { low, high } => (low, 0.0, high, 0.0),
            Eigenvalues::Complex { re, im } => (re, -im.abs(), re, im.abs()),
        };
        TrapdynEigen {
            trace: e.trace,
            determinant: e.determinant,
            discriminant: e.discriminant,
            re1,
            im1,
            re2,
            im2,
            classification: e.classification.into(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(TrapdynStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config(_) | Error::Json(_) | Error::Io(_) => TrapdynStatus::Config,
            Error::InvalidParams(_) => TrapdynStatus::InvalidParams,
            Error::Domain(_) => TrapdynStatus::Domain,
            _ => TrapdynStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TrapdynStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TrapdynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            TrapdynStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            TrapdynStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(handle: *const TrapdynModel) -> Result<&'a Model, Failure> {
    handle.as_ref().map(|h| &h.model).ok_or_else(|| null("model"))
}

unsafe fn out_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(TrapdynStatus::InvalidArgument, format!("{what} is not UTF-8: {e}")))
}

fn publish(model: Model, out: &mut *mut TrapdynModel) {
    *out = Box::into_raw(Box::new(TrapdynModel { model }));
}

/// Message from the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next `trapdyn_*` call on the same
/// thread.
#[no_mangle]
pub extern "C" fn trapdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn trapdyn_clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn trapdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a model from a JSON run configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_model_from_json(json: *const c_char, out: *mut *mut TrapdynModel) -> TrapdynStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(json, "json")?;
        let model = RunConfig::from_json(text)?.build()?;
        publish(model, out);
        Ok(())
    })
}

/// Builds one of the named models: "figure1", "figure2" or "figure3".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_model_preset(name: *const c_char, out: *mut *mut TrapdynModel) -> TrapdynStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = ptr::null_mut();
        let model = match str_arg(name, "name")? {
            "figure1" => presets::figure1()?,
            "figure2" => presets::figure2()?,
            "figure3" => presets::figure3()?,
            other => {
                return Err(Failure(
                    TrapdynStatus::InvalidArgument,
                    format!("unknown preset {other:?}"),
                ))
            }
        };
        publish(model, out);
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `model` must come from a `trapdyn_model_*` constructor and not be
/// freed twice.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_model_free(model: *mut TrapdynModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Serializes the model back to a JSON configuration. Writes at most
/// `cap` bytes including the terminator; `*len` receives the length
/// without it. Returns `BUFFER_TOO_SMALL` if `cap <= *len`.
///
/// # Safety
/// `buf` must hold `cap` bytes (it may be NULL when `cap` is zero).
#[no_mangle]
pub unsafe extern "C" fn trapdyn_model_to_json(
    model: *const TrapdynModel,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> TrapdynStatus {
    guard(|| {
        let m = model_ref(model)?;
        let len = out_mut(len, "len")?;
        let text = RunConfig::from_model(m, Default::default()).to_json()?;
        *len = text.len();
        if cap <= text.len() {
            return Err(Failure(
                TrapdynStatus::BufferTooSmall,
                format!("need {} bytes, got {cap}", text.len() + 1),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// `(ȧ, π̇)` at `(a, pi)`.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_vector_field(
    model: *const TrapdynModel,
    a: f64,
    pi: f64,
    a_dot: *mut f64,
    pi_dot: *mut f64,
) -> TrapdynStatus {
    guard(|| {
        let m = model_ref(model)?;
        let a_dot = out_mut(a_dot, "a_dot")?;
        let pi_dot = out_mut(pi_dot, "pi_dot")?;
        let (da, dp) = m.vector_field(StateVector::new(a, pi));
        *a_dot = da;
        *pi_dot = dp;
        Ok(())
    })
}

/// The low-inflation and target steady states.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_steady_states(
    model: *const TrapdynModel,
    trap: *mut TrapdynSteadyState,
    target: *mut TrapdynSteadyState,
) -> TrapdynStatus {
    guard(|| {
        let m = model_ref(model)?;
        let trap = out_mut(trap, "trap")?;
        let target = out_mut(target, "target")?;
        let (lo, hi) = trap_and_target(m, &ScanOptions::default())?;
        *trap = (&lo).into();
        *target = (&hi).into();
        Ok(())
    })
}

/// Eigen-analysis of the linearization at the trap (`which = 0`) or the
/// target (`which = 1`).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_classify_steady(
    model: *const TrapdynModel,
    which: u32,
    out: *mut TrapdynEigen,
) -> TrapdynStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out_mut(out, "out")?;
        let (lo, hi) = trap_and_target(m, &ScanOptions::default())?;
        let ss = match which {
            0 => lo,
            1 => hi,
            _ => {
                return Err(Failure(
                    TrapdynStatus::InvalidArgument,
                    format!("which must be 0 or 1 (got {which})"),
                ))
            }
        };
        *out = (&eigen2(&jacobian(m, &ss)?)).into();
        Ok(())
    })
}

/// Eigen-analysis of an arbitrary 2x2 matrix, row-major.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_classify_matrix(
    j11: f64,
    j12: f64,
    j21: f64,
    j22: f64,
    out: *mut TrapdynEigen,
) -> TrapdynStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        if ![j11, j12, j21, j22].iter().all(|x| x.is_finite()) {
            return Err(Failure(TrapdynStatus::Domain, "matrix entries must be finite".into()));
        }
        *out = (&eigen2(&Jacobian2::new(j11, j12, j21, j22))).into();
        Ok(())
    })
}

/// Trap inflation-feedback coefficient from local anchors, with the
/// remaining calibration at its defaults.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_j22_local(
    eps: f64,
    velocity: f64,
    psi_trap: f64,
    psi_prime_trap: f64,
    a_star: f64,
    out: *mut f64,
) -> TrapdynStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        let preset = CalibrationPreset {
            velocity,
            psi_trap,
            psi_prime_trap,
            a_star,
            ..CalibrationPreset::default()
        };
        *out = j22_local(&preset, eps)?;
        Ok(())
    })
}

/// Integrates forward from `(a0, pi0)` and samples every
/// `sample_interval` years. Up to `cap` samples go into `t`, `a`, `pi`;
/// `*len` receives the full count. Returns `BUFFER_TOO_SMALL` when
/// `cap < *len`, after filling what fits.
///
/// # Safety
/// `t`, `a` and `pi` must each hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn trapdyn_integrate(
    model: *const TrapdynModel,
    a0: f64,
    pi0: f64,
    horizon: f64,
    sample_interval: f64,
    t: *mut f64,
    a: *mut f64,
    pi: *mut f64,
    cap: usize,
    len: *mut usize,
) -> TrapdynStatus {
    guard(|| {
        let m = model_ref(model)?;
        let len = out_mut(len, "len")?;
        *len = 0;
        if !(sample_interval > 0.0) {
            return Err(Failure(
                TrapdynStatus::Domain,
                format!("sample_interval must be > 0 (got {sample_interval})"),
            ));
        }
        if cap > 0 && (t.is_null() || a.is_null() || pi.is_null()) {
            return Err(null("output buffer"));
        }
        let opts = IntegrateOptions {
            sample_interval: Some(sample_interval),
            ..IntegrateOptions::default()
        };
        let tr = integrate(m, StateVector::new(a0, pi0), horizon, Direction::Forward, &opts)?;
        let n = tr.len();
        *len = n;
        let k = n.min(cap);
        if k > 0 {
            std::slice::from_raw_parts_mut(t, k).copy_from_slice(&tr.t[..k]);
            std::slice::from_raw_parts_mut(a, k).copy_from_slice(&tr.a[..k]);
            std::slice::from_raw_parts_mut(pi, k).copy_from_slice(&tr.pi[..k]);
        }
        if cap < n {
            return Err(Failure(
                TrapdynStatus::BufferTooSmall,
                format!("trajectory has {n} samples, buffer holds {cap}"),
            ));
        }
        Ok(())
    })
}
