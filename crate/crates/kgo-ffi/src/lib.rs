//! C ABI over the core library: opaque handles, status codes, no panics
//! across the boundary.
//!
//! Ownership rules: everything returned through an out-pointer is owned by
//! the caller and must be released with the matching `_free` function.
//! Strings are NUL-terminated and released with `kgo_string_free`.

use kgo::measures::{self, ReportOptions};
use kgo::quadrature::QuadratureSpec;
use kgo::spectrum::{self, Branch, ModelConfig};
use kgo::states::{make_state, Space, StateError, WaveState};
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgoStatus {
    Ok = 0,
    InvalidArgument = 1,
    NoPhysicalRoot = 2,
    NonNormalizable = 3,
    InvalidDensity = 4,
    NoConvergence = 5,
    InternalPanic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgoBranch {
    Particle = 0,
    Antiparticle = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgoSpace {
    Coordinate = 0,
    Momentum = 1,
}

impl From<KgoBranch> for Branch {
    fn from(b: KgoBranch) -> Self {
        match b {
            KgoBranch::Particle => Branch::Particle,
            KgoBranch::Antiparticle => Branch::Antiparticle,
        }
    }
}

impl From<KgoSpace> for Space {
    fn from(s: KgoSpace) -> Self {
        match s {
            KgoSpace::Coordinate => Space::Coordinate,
            KgoSpace::Momentum => Space::Momentum,
        }
    }
}

/// Opaque normalized state handle.
pub struct KgoState {
    inner: WaveState,
}

/// Opaque measure-report handle.
pub struct KgoReport {
    inner: measures::MeasureReport,
}

fn status_of_state_error(e: &StateError) -> KgoStatus {
    match e {
        StateError::NonNormalizable { .. } => KgoStatus::NonNormalizable,
        StateError::InvalidDensity { .. } => KgoStatus::InvalidDensity,
        StateError::NormalizationCheck { .. } => KgoStatus::NoConvergence,
        StateError::Quadrature(_) => KgoStatus::NoConvergence,
    }
}

fn guarded<F: FnOnce() -> KgoStatus>(f: F) -> KgoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => KgoStatus::InternalPanic,
    }
}

/// Energy of level `n`; writes the eigenvalue to `out_energy`.
///
/// # Safety
/// `out_energy` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn kgo_energy(
    gamma: f64,
    n: u32,
    branch: KgoBranch,
    out_energy: *mut f64,
) -> KgoStatus {
    if out_energy.is_null() {
        return KgoStatus::InvalidArgument;
    }
    guarded(|| {
        let config = match ModelConfig::new(gamma, branch.into()) {
            Ok(c) => c,
            Err(_) => return KgoStatus::InvalidArgument,
        };
        match spectrum::solve_level(&config, n) {
            Ok(lvl) => {
                unsafe { *out_energy = lvl.energy };
                KgoStatus::Ok
            }
            Err(_) => KgoStatus::NoPhysicalRoot,
        }
    })
}

/// Saturation asymptote `1/|gamma|`; fails for `gamma = 0`.
///
/// # Safety
/// `out_asymptote` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn kgo_asymptote(gamma: f64, out_asymptote: *mut f64) -> KgoStatus {
    if out_asymptote.is_null() {
        return KgoStatus::InvalidArgument;
    }
    match spectrum::asymptote(gamma) {
        Ok(a) => {
            unsafe { *out_asymptote = a };
            KgoStatus::Ok
        }
        Err(_) => KgoStatus::InvalidArgument,
    }
}

/// Build a normalized state; on success `*out_state` owns the handle.
///
/// # Safety
/// `out_state` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn kgo_state_new(
    gamma: f64,
    n: u32,
    branch: KgoBranch,
    space: KgoSpace,
    out_state: *mut *mut KgoState,
) -> KgoStatus {
    if out_state.is_null() {
        return KgoStatus::InvalidArgument;
    }
    guarded(|| {
        let config = match ModelConfig::new(gamma, branch.into()) {
            Ok(c) => c,
            Err(_) => return KgoStatus::InvalidArgument,
        };
        let lvl = match spectrum::solve_level(&config, n) {
            Ok(l) => l,
            Err(_) => return KgoStatus::NoPhysicalRoot,
        };
        match make_state(&lvl, gamma, space.into()) {
            Ok(st) => {
                let boxed = Box::new(KgoState { inner: st });
                unsafe { *out_state = Box::into_raw(boxed) };
                KgoStatus::Ok
            }
            Err(e) => status_of_state_error(&e),
        }
    })
}

/// Release a state handle. Null is a no-op.
///
/// # Safety
/// `state` must be null or a pointer obtained from `kgo_state_new`.
#[no_mangle]
pub unsafe extern "C" fn kgo_state_free(state: *mut KgoState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Truncation radius of the state's numerical domain.
///
/// # Safety
/// `state` must be a valid handle; `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kgo_state_radius(state: *const KgoState, out: *mut f64) -> KgoStatus {
    if state.is_null() || out.is_null() {
        return KgoStatus::InvalidArgument;
    }
    unsafe { *out = (*state).inner.radius() };
    KgoStatus::Ok
}

/// Probability density at `a`.
///
/// # Safety
/// `state` must be a valid handle; `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kgo_state_rho(
    state: *const KgoState,
    a: f64,
    out: *mut f64,
) -> KgoStatus {
    if state.is_null() || out.is_null() {
        return KgoStatus::InvalidArgument;
    }
    unsafe { *out = (*state).inner.rho(a) };
    KgoStatus::Ok
}

/// Fisher information density at `a`; fails if the weight changes sign.
///
/// # Safety
/// `state` must be a valid handle; `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kgo_state_fisher_density(
    state: *const KgoState,
    a: f64,
    out: *mut f64,
) -> KgoStatus {
    if state.is_null() || out.is_null() {
        return KgoStatus::InvalidArgument;
    }
    match unsafe { &*state }.inner.fisher_density(a) {
        Ok(v) => {
            unsafe { *out = v };
            KgoStatus::Ok
        }
        Err(e) => status_of_state_error(&e),
    }
}

/// Shannon entropy density `ρ ln ρ` at `a`; fails if the weight changes sign.
///
/// # Safety
/// `state` must be a valid handle; `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kgo_state_shannon_density(
    state: *const KgoState,
    a: f64,
    out: *mut f64,
) -> KgoStatus {
    if state.is_null() || out.is_null() {
        return KgoStatus::InvalidArgument;
    }
    match unsafe { &*state }.inner.shannon_density(a) {
        Ok(v) => {
            unsafe { *out = v };
            KgoStatus::Ok
        }
        Err(e) => status_of_state_error(&e),
    }
}

/// Compute the full measure report for `(gamma, n)` on the given branch.
///
/// # Safety
/// `out_report` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn kgo_report_new(
    gamma: f64,
    n: u32,
    branch: KgoBranch,
    out_report: *mut *mut KgoReport,
) -> KgoStatus {
    if out_report.is_null() {
        return KgoStatus::InvalidArgument;
    }
    guarded(|| {
        let spec = QuadratureSpec::default();
        let options = ReportOptions {
            forensic: false,
            paper_mode: true,
        };
        match measures::report(gamma, n, branch.into(), &spec, &options) {
            Ok(r) => {
                let boxed = Box::new(KgoReport { inner: r });
                unsafe { *out_report = Box::into_raw(boxed) };
                KgoStatus::Ok
            }
            Err(measures::MeasureError::Spectrum(_)) => KgoStatus::NoPhysicalRoot,
            Err(measures::MeasureError::State(e)) => status_of_state_error(&e),
            Err(measures::MeasureError::Quadrature(_)) => KgoStatus::NoConvergence,
        }
    })
}

/// Release a report handle. Null is a no-op.
///
/// # Safety
/// `report` must be null or a pointer obtained from `kgo_report_new`.
#[no_mangle]
pub unsafe extern "C" fn kgo_report_free(report: *mut KgoReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Serialize a report as JSON; the string must be released with
/// `kgo_string_free`.
///
/// # Safety
/// `report` must be a valid handle; `out_json` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kgo_report_to_json(
    report: *const KgoReport,
    out_json: *mut *mut c_char,
) -> KgoStatus {
    if report.is_null() || out_json.is_null() {
        return KgoStatus::InvalidArgument;
    }
    let json = match serde_json::to_string(&unsafe { &*report }.inner) {
        Ok(s) => s,
        Err(_) => return KgoStatus::InternalPanic,
    };
    match CString::new(json) {
        Ok(c) => {
            unsafe { *out_json = c.into_raw() };
            KgoStatus::Ok
        }
        Err(_) => KgoStatus::InternalPanic,
    }
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer obtained from `kgo_report_to_json`.
#[no_mangle]
pub unsafe extern "C" fn kgo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
