//! C ABI over `svqe-core`.
//!
//! Every fallible function returns an [`SvqeStatus`]; on failure a message
//! is available from [`svqe_last_error_message`] on the same thread. Objects
//! are opaque handles released with their `_free` function. Two-qubit Pauli
//! vectors cross the boundary as 16 doubles in the order II, IX, IY, IZ,
//! XI, …, ZZ (left factor on qubit 1).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use svqe_core::hamiltonian::{bundled_h2_table, energy, exact_solution, Hamiltonian};
use svqe_core::pauli::PauliVector;
use svqe_core::positivity::{min_eigenvalue, project_physical};
use svqe_core::simulator::{prepare_ansatz_vector, ErrorLevel, NoiseModel};
use svqe_core::symmetry::{symmetry_verify, SymmetrySpec};
use svqe_core::vqe::{evaluate_energy, optimize, OptimizerConfig, Pipeline, RunResult};
use svqe_core::Error;

/// Number of coefficients of a two-qubit Pauli vector.
pub const SVQE_PAULI_LEN: usize = 16;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvqeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// Cumulative noise levels accepted by [`svqe_noise_model_set_level`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub enum SvqeErrorLevel {
    Ideal = 0,
    Dephasing = 1,
    Relaxation = 2,
    Residual = 3,
    GateDephasing = 4,
}

/// Reconstruction pipelines accepted by [`svqe_evaluate_energy`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub enum SvqePipeline {
    ShotTomography = 0,
    GaussianShortcut = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SvqeMetrics {
    pub bond_distance: f64,
    pub theta: f64,
    pub e_raw: f64,
    pub e_sv: f64,
    pub de_raw: f64,
    pub de_sv: f64,
    pub f_raw: f64,
    pub f_sv: f64,
    pub generations: usize,
    pub converged: bool,
}

pub struct SvqeHamiltonian(Hamiltonian);
pub struct SvqeNoiseModel(NoiseModel);
pub struct SvqeRunResult(RunResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SvqeStatus {
    match e {
        Error::Config(_) | Error::InvalidNoiseModel(_) | Error::Json(_) => SvqeStatus::Config,
        Error::Io(_) | Error::Csv(_) | Error::Parse { .. } | Error::Schema { .. } => SvqeStatus::Io,
        Error::SingularCalibration { .. } | Error::RankDeficient { .. } | Error::VanishingSupport { .. } => {
            SvqeStatus::Numerical
        }
        _ => SvqeStatus::InvalidArgument,
    }
}

struct Failure(SvqeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SvqeStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SvqeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SvqeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SvqeStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_vector(p: *const f64) -> Result<PauliVector, Failure> {
    if p.is_null() {
        return Err(null("coefficient array"));
    }
    let coeffs = std::slice::from_raw_parts(p, SVQE_PAULI_LEN).to_vec();
    Ok(PauliVector::new(2, coeffs)?)
}

unsafe fn write_vector(out: *mut f64, v: &PauliVector) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output array"));
    }
    ptr::copy_nonoverlapping(v.coeffs().as_ptr(), out, SVQE_PAULI_LEN);
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SvqeStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn svqe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn svqe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Rows in the bundled H2 coefficient table.
#[no_mangle]
pub extern "C" fn svqe_bundled_table_len() -> usize {
    bundled_h2_table().len()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn svqe_hamiltonian_bundled(row: usize, out: *mut *mut SvqeHamiltonian) -> SvqeStatus {
    guard(|| {
        let table = bundled_h2_table();
        let h = table
            .get(row)
            .cloned()
            .ok_or_else(|| Failure(SvqeStatus::InvalidArgument, format!("row {row} out of range")))?;
        write_out(out, boxed(SvqeHamiltonian(h)), "out")
    })
}

/// Builds an H2 Hamiltonian from coefficients ordered II, ZI, IZ, XX, YY, ZZ.
///
/// # Safety
/// `coeffs` must point to 6 doubles; `out` to storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn svqe_hamiltonian_h2(
    bond_distance: f64,
    coeffs: *const f64,
    out: *mut *mut SvqeHamiltonian,
) -> SvqeStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let mut c = [0.0; 6];
        c.copy_from_slice(std::slice::from_raw_parts(coeffs, 6));
        let h = Hamiltonian::h2(bond_distance, c)?;
        write_out(out, boxed(SvqeHamiltonian(h)), "out")
    })
}

/// # Safety
/// `h` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_hamiltonian_bond_distance(h: *const SvqeHamiltonian, out: *mut f64) -> SvqeStatus {
    guard(|| write_out(out, deref(h, "h")?.0.bond_distance(), "out"))
}

/// # Safety
/// `h` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn svqe_hamiltonian_free(h: *mut SvqeHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Exact ground energy (Hartree) and the ideal-ansatz optimal angle.
///
/// # Safety
/// `h` must be a live handle; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_exact_solution(
    h: *const SvqeHamiltonian,
    ground_energy: *mut f64,
    optimal_theta: *mut f64,
) -> SvqeStatus {
    guard(|| {
        let r = exact_solution(&deref(h, "h")?.0)?;
        write_out(ground_energy, r.ground_energy, "ground_energy")?;
        write_out(optimal_theta, r.optimal_theta, "optimal_theta")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_noise_model_device_default(out: *mut *mut SvqeNoiseModel) -> SvqeStatus {
    guard(|| write_out(out, boxed(SvqeNoiseModel(NoiseModel::device_default())), "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_noise_model_ideal(out: *mut *mut SvqeNoiseModel) -> SvqeStatus {
    guard(|| write_out(out, boxed(SvqeNoiseModel(NoiseModel::ideal())), "out"))
}

/// Parses a noise model from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_noise_model_from_json(json: *const c_char, out: *mut *mut SvqeNoiseModel) -> SvqeStatus {
    guard(|| {
        let model: NoiseModel = serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        model.validate()?;
        write_out(out, boxed(SvqeNoiseModel(model)), "out")
    })
}

/// `level` takes an [`SvqeErrorLevel`] value.
///
/// # Safety
/// `noise` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn svqe_noise_model_set_level(noise: *mut SvqeNoiseModel, level: u32) -> SvqeStatus {
    guard(|| {
        let n = noise.as_mut().ok_or_else(|| null("noise"))?;
        let level = *ErrorLevel::ALL
            .get(level as usize)
            .ok_or_else(|| Failure(SvqeStatus::InvalidArgument, format!("unknown error level {level}")))?;
        n.0 = n.0.with_level(level);
        Ok(())
    })
}

/// # Safety
/// `noise` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn svqe_noise_model_free(noise: *mut SvqeNoiseModel) {
    if !noise.is_null() {
        drop(Box::from_raw(noise));
    }
}

/// Exact Pauli vector of the simulated ansatz state.
///
/// # Safety
/// `noise` must be a live handle; `out` must hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn svqe_prepare_ansatz(theta: f64, noise: *const SvqeNoiseModel, out: *mut f64) -> SvqeStatus {
    guard(|| {
        let v = prepare_ansatz_vector(theta, &deref(noise, "noise")?.0)?;
        write_vector(out, &v)
    })
}

/// Symmetry verification onto ZZ = −1.
///
/// # Safety
/// `raw` and `out` must each hold 16 doubles; they may alias.
#[no_mangle]
pub unsafe extern "C" fn svqe_symmetry_verify(raw: *const f64, out: *mut f64) -> SvqeStatus {
    guard(|| {
        let v = symmetry_verify(&read_vector(raw)?, &SymmetrySpec::h2_parity())?;
        write_vector(out, &v)
    })
}

/// Nearest physical state; `input_min_eigenvalue` may be NULL.
///
/// # Safety
/// `raw` and `out` must each hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn svqe_project_physical(
    raw: *const f64,
    out: *mut f64,
    input_min_eigenvalue: *mut f64,
) -> SvqeStatus {
    guard(|| {
        let v = read_vector(raw)?;
        let report = project_physical(&v);
        if !input_min_eigenvalue.is_null() {
            input_min_eigenvalue.write(min_eigenvalue(&v));
        }
        write_vector(out, &report.output)
    })
}

/// # Safety
/// `h` must be a live handle; `coeffs` must hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn svqe_energy(h: *const SvqeHamiltonian, coeffs: *const f64, out: *mut f64) -> SvqeStatus {
    guard(|| {
        let e = energy(&read_vector(coeffs)?, &deref(h, "h")?.0)?;
        write_out(out, e, "out")
    })
}

/// One sampled energy; `n_meas = 0` reconstructs exactly. `pipeline` takes
/// an [`SvqePipeline`] value. `coeffs` may be NULL.
///
/// # Safety
/// Handles must be live; `energy_out` writable; `coeffs` NULL or 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn svqe_evaluate_energy(
    theta: f64,
    h: *const SvqeHamiltonian,
    noise: *const SvqeNoiseModel,
    n_meas: u64,
    seed: u64,
    pipeline: u32,
    energy_out: *mut f64,
    coeffs: *mut f64,
) -> SvqeStatus {
    guard(|| {
        let pipeline = match pipeline {
            0 => Pipeline::ShotTomography,
            1 => Pipeline::GaussianShortcut,
            p => return Err(Failure(SvqeStatus::InvalidArgument, format!("unknown pipeline {p}"))),
        };
        let n = (n_meas > 0).then_some(n_meas);
        let (e, v) = evaluate_energy(theta, &deref(h, "h")?.0, &deref(noise, "noise")?.0, n, seed, pipeline)?;
        write_out(energy_out, e, "energy_out")?;
        if !coeffs.is_null() {
            write_vector(coeffs, &v)?;
        }
        Ok(())
    })
}

/// Full optimization. `optimizer_json` may be NULL for defaults; `seed`
/// overrides the seed in it.
///
/// # Safety
/// Handles must be live; `optimizer_json` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_optimize(
    h: *const SvqeHamiltonian,
    noise: *const SvqeNoiseModel,
    optimizer_json: *const c_char,
    seed: u64,
    out: *mut *mut SvqeRunResult,
) -> SvqeStatus {
    guard(|| {
        let mut cfg: OptimizerConfig = if optimizer_json.is_null() {
            OptimizerConfig::default()
        } else {
            serde_json::from_str(read_str(optimizer_json, "optimizer_json")?).map_err(Error::from)?
        };
        cfg.seed = seed;
        cfg.validate()?;
        let run = optimize(&deref(h, "h")?.0, &deref(noise, "noise")?.0, &cfg)?;
        write_out(out, boxed(SvqeRunResult(run)), "out")
    })
}

/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_run_result_metrics(run: *const SvqeRunResult, out: *mut SvqeMetrics) -> SvqeStatus {
    guard(|| {
        let r = &deref(run, "run")?.0;
        let m = &r.metrics;
        let metrics = SvqeMetrics {
            bond_distance: r.bond_distance,
            theta: r.converged_theta,
            e_raw: m.e_raw,
            e_sv: m.e_sv,
            de_raw: m.de_raw,
            de_sv: m.de_sv,
            f_raw: m.f_raw,
            f_sv: m.f_sv,
            generations: r.generations,
            converged: r.optimizer_converged,
        };
        write_out(out, metrics, "out")
    })
}

/// Raw (`verified = false`) or verified final Pauli vector.
///
/// # Safety
/// `run` must be a live handle; `out` must hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn svqe_run_result_vector(run: *const SvqeRunResult, verified: bool, out: *mut f64) -> SvqeStatus {
    guard(|| {
        let r = &deref(run, "run")?.0;
        write_vector(out, if verified { &r.sv_vector } else { &r.raw_vector })
    })
}

/// JSON form of the result; release with [`svqe_string_free`].
///
/// # Safety
/// `run` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn svqe_run_result_to_json(run: *const SvqeRunResult, out: *mut *mut c_char) -> SvqeStatus {
    guard(|| {
        let json = serde_json::to_string(&deref(run, "run")?.0).map_err(Error::from)?;
        let c = CString::new(json).map_err(|e| Failure(SvqeStatus::InvalidArgument, e.to_string()))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `run` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn svqe_run_result_free(run: *mut SvqeRunResult) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn svqe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
