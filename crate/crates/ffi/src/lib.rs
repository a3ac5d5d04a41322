//! C ABI over the `cavent` library.
//!
//! Every fallible call returns a [`CaventStatus`]. On failure the message is
//! kept per thread and read back with [`cavent_last_error_message`]. Handles
//! from `cavent_params_new_*` must be released with [`cavent_params_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cavent::closed::{effective_evolution, mes_lapse_analytic, mes_threshold_ratio, ClosedDynamics};
use cavent::density::DensityMatrix;
use cavent::experiments::run_scenario;
use cavent::measures::concurrence;
use cavent::model::{analytic_eigensystem, ModelParams};
use cavent::numerics::ComplexMatrix;
use cavent::open::steady_state_concurrence;
use cavent::Error;
use num_complex::Complex64;

/// Result codes shared by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaventStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Io = 4,
    Panic = 5,
}

/// Opaque parameter set.
pub struct CaventParams {
    inner: ModelParams,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> CaventStatus {
    match e {
        Error::Io(_) => CaventStatus::Io,
        e if e.is_usage() => CaventStatus::InvalidArgument,
        _ => CaventStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CaventStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CaventStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            CaventStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            CaventStatus::Panic
        }
    }
}

unsafe fn params_ref<'a>(p: *const CaventParams) -> Result<&'a ModelParams, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or(Failure::Null("params"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn string_arg(s: *const c_char, what: &'static str) -> Result<String, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Core(Error::InvalidArgument(format!("{what} is not valid UTF-8"))))
}

fn boxed(p: ModelParams) -> *mut CaventParams {
    Box::into_raw(Box::new(CaventParams { inner: p }))
}

/// Parameters of the dispersive closed system with `g2/g1 = ratio`.
#[no_mangle]
pub extern "C" fn cavent_params_new_dispersive(ratio: f64) -> *mut CaventParams {
    boxed(ModelParams::dispersive(ratio))
}

/// Parameters of the resonant, driven and lossy system.
#[no_mangle]
pub extern "C" fn cavent_params_new_open(ratio: f64, drive: f64) -> *mut CaventParams {
    boxed(ModelParams::open_resonant(ratio, drive))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from `cavent_params_new_*` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cavent_params_free(p: *mut CaventParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets one field: `g1`, `g2`, `g2_over_g1`, `omega`, `eps` (both qubits),
/// `eps1`, `eps2`, `kappa`, `gamma`, `d`, `drive_omega` or `n_max`.
///
/// # Safety
/// `p` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cavent_params_set(p: *mut CaventParams, key: *const c_char, value: f64) -> CaventStatus {
    guard(|| {
        let h = out_ref(p, "params")?;
        let key = string_arg(key, "key")?;
        let mut next = h.inner;
        match key.as_str() {
            "g1" => next.g1 = value,
            "g2" => next.g2 = value,
            "g2_over_g1" => next.g2 = value * next.g1,
            "omega" => next.omega = value,
            "eps" => {
                next.eps1 = value;
                next.eps2 = value;
            }
            "eps1" => next.eps1 = value,
            "eps2" => next.eps2 = value,
            "kappa" => next.kappa = value,
            "gamma" => next.gamma = value,
            "d" => next.d = value,
            "drive_omega" => next.drive_omega = value,
            "n_max" => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= 64.0) {
                    return Err(Error::InvalidArgument(format!("n_max must be a positive integer, got {value}")).into());
                }
                next.n_max = value as usize;
            }
            other => return Err(Error::InvalidOverride(format!("unknown key '{other}'")).into()),
        }
        next.validate()?;
        h.inner = next;
        Ok(())
    })
}

/// Analytic single-excitation eigensystem.
///
/// `energies` receives `E1, E2, E3`; `vectors` receives the nine real
/// amplitudes `(alpha, beta, gamma)` of each eigenvector in the same order.
///
/// # Safety
/// `energies` must hold 3 doubles and `vectors` 9.
#[no_mangle]
pub unsafe extern "C" fn cavent_eigensystem(
    p: *const CaventParams,
    energies: *mut f64,
    vectors: *mut f64,
) -> CaventStatus {
    guard(|| {
        let params = params_ref(p)?;
        if energies.is_null() || vectors.is_null() {
            return Err(Failure::Null("output buffer"));
        }
        let es = analytic_eigensystem(params)?;
        let e = std::slice::from_raw_parts_mut(energies, 3);
        let v = std::slice::from_raw_parts_mut(vectors, 9);
        e.copy_from_slice(&es.energies());
        for (k, s) in es.vectors().iter().enumerate() {
            v[3 * k..3 * k + 3].copy_from_slice(&[s.alpha.re, s.beta.re, s.gamma.re]);
        }
        Ok(())
    })
}

/// Concurrence from the exact closed dynamics, starting with qubit 2 excited.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cavent_closed_concurrence(p: *const CaventParams, t: f64, out: *mut f64) -> CaventStatus {
    guard(|| {
        let params = params_ref(p)?;
        let out = out_ref(out, "out")?;
        *out = ClosedDynamics::from_qubit2_excited(params)?.concurrence_at(t);
        Ok(())
    })
}

/// Concurrence from the effective dispersive evolution.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cavent_effective_concurrence(p: *const CaventParams, t: f64, out: *mut f64) -> CaventStatus {
    guard(|| {
        let params = params_ref(p)?;
        let out = out_ref(out, "out")?;
        *out = effective_evolution(params, t)?.concurrence();
        Ok(())
    })
}

/// Analytic MES lapse and period. The lapse is NaN below the threshold ratio.
///
/// # Safety
/// `p` must be a live handle; both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cavent_mes_lapse(p: *const CaventParams, lapse: *mut f64, period: *mut f64) -> CaventStatus {
    guard(|| {
        let params = params_ref(p)?;
        let lapse = out_ref(lapse, "lapse")?;
        let period = out_ref(period, "period")?;
        let m = mes_lapse_analytic(params)?;
        *lapse = m.lapse.unwrap_or(f64::NAN);
        *period = m.period;
        Ok(())
    })
}

/// Smallest `g2/g1` for which maximally entangled states are reached.
#[no_mangle]
pub extern "C" fn cavent_mes_threshold_ratio() -> f64 {
    mes_threshold_ratio()
}

/// Steady-state qubit concurrence of the driven, lossy system.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cavent_steady_state_concurrence(p: *const CaventParams, out: *mut f64) -> CaventStatus {
    guard(|| {
        let params = params_ref(p)?;
        let out = out_ref(out, "out")?;
        *out = steady_state_concurrence(params)?;
        Ok(())
    })
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// `rho` holds 32 doubles: the 4x4 matrix in row-major order, each entry as
/// `re, im`, in the basis `|00>, |01>, |10>, |11>`.
///
/// # Safety
/// `rho` must point to 32 readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn cavent_concurrence(rho: *const f64, out: *mut f64) -> CaventStatus {
    guard(|| {
        if rho.is_null() {
            return Err(Failure::Null("rho"));
        }
        let out = out_ref(out, "out")?;
        let raw = std::slice::from_raw_parts(rho, 32);
        let data = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let m = ComplexMatrix::from_row_major(4, 4, data)
            .and_then(DensityMatrix::new)
            .map_err(|e| Error::InvalidArgument(format!("rho: {e}")))?;
        *out = concurrence(&m)?;
        Ok(())
    })
}

/// Runs a named scenario and writes its CSV files.
///
/// `out_dir` may be null to use the default location. `overrides` is an
/// array of `n_overrides` strings of the form `key=value`. `threads = 0`
/// uses all cores.
///
/// # Safety
/// All non-null pointers must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cavent_run_scenario(
    name: *const c_char,
    out_dir: *const c_char,
    overrides: *const *const c_char,
    n_overrides: usize,
    threads: usize,
) -> CaventStatus {
    guard(|| {
        let name = string_arg(name, "name")?;
        let dir = if out_dir.is_null() { None } else { Some(string_arg(out_dir, "out_dir")?) };
        let mut list = Vec::with_capacity(n_overrides);
        if n_overrides > 0 {
            if overrides.is_null() {
                return Err(Failure::Null("overrides"));
            }
            for &s in std::slice::from_raw_parts(overrides, n_overrides) {
                list.push(string_arg(s, "override")?);
            }
        }
        let threads = (threads > 0).then_some(threads);
        run_scenario(&name, &list, dir.as_deref().map(Path::new), threads)?;
        Ok(())
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cavent_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cavent_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
