//! C interface to the tricap simulator.
//!
//! Every object is an opaque heap handle created by a `*_new` or `*_parse`
//! call and released by the matching `*_free`. Functions return a
//! [`TricapStatus`]; on failure a one-line description is available from
//! [`tricap_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use tricap::audit::{self, EnergyLedger};
use tricap::config::{parse_config, ScenarioConfig, TimeStep};
use tricap::scenario::{build_initial_state, InitialState};
use tricap::solid::{self, SolidState};
use tricap::stepper::{self, FluidState, StepperOptions};
use tricap::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TricapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The handle belongs to the other kind of scenario (fluid vs solid).
    WrongScenario = 3,
    /// A caller buffer is too small.
    BufferTooSmall = 4,
    TotalSpreading = 10,
    InvalidParameter = 11,
    LinearSolveFailure = 12,
    PoissonSolveFailure = 13,
    CflViolation = 14,
    Inverted = 15,
    ParseError = 16,
    UnknownKey = 17,
    ContourNotFound = 18,
    InvariantBreach = 19,
    IoFailure = 20,
    /// A Rust panic was caught at the boundary.
    Internal = 99,
}

impl From<&Error> for TricapStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::TotalSpreading { .. } => TricapStatus::TotalSpreading,
            Error::InvalidParameter { .. } => TricapStatus::InvalidParameter,
            Error::LinearSolveFailure { .. } => TricapStatus::LinearSolveFailure,
            Error::PoissonSolveFailure { .. } => TricapStatus::PoissonSolveFailure,
            Error::CflViolation { .. } => TricapStatus::CflViolation,
            Error::Inverted { .. } => TricapStatus::Inverted,
            Error::Parse { .. } => TricapStatus::ParseError,
            Error::UnknownKey { .. } => TricapStatus::UnknownKey,
            Error::ContourNotFound(_) => TricapStatus::ContourNotFound,
            Error::InvariantBreach { .. } => TricapStatus::InvariantBreach,
            Error::Io(_) => TricapStatus::IoFailure,
        }
    }
}

/// Energy ledger row; same columns as `energy.csv`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TricapEnergy {
    pub time: f64,
    pub ke_fluid: f64,
    pub free_energy: f64,
    pub wall_energy: f64,
    pub ke_solid: f64,
    pub strain_solid: f64,
    pub d_chem: f64,
    pub d_visc: f64,
    pub residual: f64,
    pub residual_rel: f64,
    pub total: f64,
}

impl From<&EnergyLedger> for TricapEnergy {
    fn from(r: &EnergyLedger) -> Self {
        TricapEnergy {
            time: r.time,
            ke_fluid: r.ke_fluid,
            free_energy: r.free_energy,
            wall_energy: r.wall_energy,
            ke_solid: r.ke_solid,
            strain_solid: r.strain_solid,
            d_chem: r.d_chem,
            d_visc: r.d_visc,
            residual: r.residual,
            residual_rel: r.residual_rel,
            total: r.total(),
        }
    }
}

/// Parsed scenario configuration.
pub struct TricapConfig(ScenarioConfig);

/// Fluid simulation state.
pub struct TricapFluid {
    state: FluidState,
    opts: StepperOptions,
    dt: TimeStep,
    last: EnergyLedger,
    steps: u64,
}

/// Solid simulation state.
pub struct TricapSolid {
    state: SolidState,
    dt: TimeStep,
    last: EnergyLedger,
    steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = message.replace(['\n', '\r', '\0'], " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn fail(status: TricapStatus, message: &str) -> TricapStatus {
    set_error(message);
    status
}

fn fail_with(e: &Error) -> TricapStatus {
    fail(e.into(), &e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> TricapStatus) -> TricapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(TricapStatus::Internal, &msg)
        }
    }
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return fail(TricapStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
    (mut $p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(r) => r,
            None => return fail(TricapStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, TricapStatus> {
    if p.is_null() {
        return Err(fail(TricapStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TricapStatus::InvalidUtf8, "string argument is not UTF-8"))
}

/// Description of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn tricap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code, e.g. `"CflViolation"`.
#[no_mangle]
pub extern "C" fn tricap_status_name(status: TricapStatus) -> *const c_char {
    let s: &'static CStr = match status {
        TricapStatus::Ok => c"Ok",
        TricapStatus::NullPointer => c"NullPointer",
        TricapStatus::InvalidUtf8 => c"InvalidUtf8",
        TricapStatus::WrongScenario => c"WrongScenario",
        TricapStatus::BufferTooSmall => c"BufferTooSmall",
        TricapStatus::TotalSpreading => c"TotalSpreading",
        TricapStatus::InvalidParameter => c"InvalidParameter",
        TricapStatus::LinearSolveFailure => c"LinearSolveFailure",
        TricapStatus::PoissonSolveFailure => c"PoissonSolveFailure",
        TricapStatus::CflViolation => c"CflViolation",
        TricapStatus::Inverted => c"Inverted",
        TricapStatus::ParseError => c"ParseError",
        TricapStatus::UnknownKey => c"UnknownKey",
        TricapStatus::ContourNotFound => c"ContourNotFound",
        TricapStatus::InvariantBreach => c"InvariantBreach",
        TricapStatus::IoFailure => c"IoFailure",
        TricapStatus::Internal => c"Internal",
    };
    s.as_ptr()
}

/// Parses and validates a configuration from NUL-terminated text.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tricap_config_parse(text: *const c_char, out: *mut *mut TricapConfig) -> TricapStatus {
    guard(|| {
        let out = deref!(mut out);
        *out = ptr::null_mut();
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_config(text).and_then(|c| c.validate().map(|_| c)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(TricapConfig(cfg)));
                TricapStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Defaults for a scenario given by name, e.g. `"lens"`.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tricap_config_defaults(name: *const c_char, out: *mut *mut TricapConfig) -> TricapStatus {
    guard(|| {
        let out = deref!(mut out);
        *out = ptr::null_mut();
        let name = match str_arg(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match name.parse() {
            Ok(scenario) => {
                *out = Box::into_raw(Box::new(TricapConfig(ScenarioConfig::defaults(scenario))));
                TricapStatus::Ok
            }
            Err(_) => fail(TricapStatus::ParseError, &format!("unknown scenario `{name}`")),
        }
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tricap_config_free(cfg: *mut TricapConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs a whole scenario, writing outputs to `out_dir` (or the configured
/// directory when null). `steps` overrides the end time when nonzero.
///
/// # Safety
/// `cfg` must be a valid handle; `out_dir` null or a valid C string.
#[no_mangle]
pub unsafe extern "C" fn tricap_run(cfg: *const TricapConfig, out_dir: *const c_char, steps: u64) -> TricapStatus {
    guard(|| {
        let mut cfg = deref!(cfg).0.clone();
        if !out_dir.is_null() {
            match str_arg(out_dir) {
                Ok(d) => cfg.out_dir = PathBuf::from(d),
                Err(s) => return s,
            }
        }
        if steps > 0 {
            cfg.steps = Some(steps as usize);
        }
        match tricap::runner::run(&cfg) {
            Ok(_) => TricapStatus::Ok,
            Err(f) => fail(TricapStatus::from(&f.error), &f.to_string()),
        }
    })
}

/// Builds the initial fluid state of a fluid scenario.
///
/// # Safety
/// `cfg` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tricap_fluid_new(cfg: *const TricapConfig, out: *mut *mut TricapFluid) -> TricapStatus {
    guard(|| {
        let out = deref!(mut out);
        *out = ptr::null_mut();
        let cfg = &deref!(cfg).0;
        match build_initial_state(cfg) {
            Ok(InitialState::Fluid(state)) => {
                let last = audit::ledger(&state);
                *out = Box::into_raw(Box::new(TricapFluid {
                    state,
                    opts: cfg.stepper_options(),
                    dt: cfg.dt,
                    last,
                    steps: 0,
                }));
                TricapStatus::Ok
            }
            Ok(InitialState::Solid(_)) => fail(TricapStatus::WrongScenario, "solid scenario given to tricap_fluid_new"),
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `sim` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tricap_fluid_free(sim: *mut TricapFluid) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances one step. `dt <= 0` uses the configured step (auto picks half
/// the strictest stability bound).
///
/// # Safety
/// `sim` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn tricap_fluid_step(sim: *mut TricapFluid, dt: f64) -> TricapStatus {
    guard(|| {
        let sim = deref!(mut sim);
        let dt = if dt > 0.0 {
            dt
        } else {
            match sim.dt {
                TimeStep::Fixed(d) => d,
                TimeStep::Auto => 0.5 * stepper::stability_limits(&sim.state, &sim.opts).strictest(),
            }
        };
        if let Err(e) = stepper::step(&mut sim.state, dt, &sim.opts) {
            return fail_with(&e);
        }
        let mut next = audit::ledger(&sim.state);
        let (r, rel) = audit::balance_residual(&sim.last, &next, dt);
        next.residual = r;
        next.residual_rel = rel;
        sim.last = next;
        sim.steps += 1;
        TricapStatus::Ok
    })
}

/// Energy ledger of the current state.
///
/// # Safety
/// `sim` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tricap_fluid_energy(sim: *const TricapFluid, out: *mut TricapEnergy) -> TricapStatus {
    guard(|| {
        *deref!(mut out) = (&deref!(sim).last).into();
        TricapStatus::Ok
    })
}

/// Grid size, simulated time and completed steps. Any output may be null.
///
/// # Safety
/// `sim` must be a valid handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn tricap_fluid_info(
    sim: *const TricapFluid,
    nx: *mut usize,
    ny: *mut usize,
    time: *mut f64,
    steps: *mut u64,
) -> TricapStatus {
    guard(|| {
        let sim = deref!(sim);
        if let Some(p) = nx.as_mut() {
            *p = sim.state.grid.nx;
        }
        if let Some(p) = ny.as_mut() {
            *p = sim.state.grid.ny;
        }
        if let Some(p) = time.as_mut() {
            *p = sim.state.time;
        }
        if let Some(p) = steps.as_mut() {
            *p = sim.steps;
        }
        TricapStatus::Ok
    })
}

/// Copies phase `phase` (0, 1 or 2) into `buf`, row-major with `x` fastest.
/// `len` must be at least `nx * ny`.
///
/// # Safety
/// `sim` must be a valid handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn tricap_fluid_phase(sim: *const TricapFluid, phase: usize, buf: *mut f64, len: usize) -> TricapStatus {
    guard(|| {
        let sim = deref!(sim);
        if phase > 2 {
            return fail(TricapStatus::InvalidParameter, &format!("phase index {phase} is not 0, 1 or 2"));
        }
        if buf.is_null() {
            return fail(TricapStatus::NullPointer, "null buf");
        }
        let values = sim.state.c.c[phase].interior();
        if len < values.len() {
            return fail(
                TricapStatus::BufferTooSmall,
                &format!("buffer holds {len} values, need {}", values.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(&values);
        TricapStatus::Ok
    })
}

/// Builds the initial state of a solid scenario.
///
/// # Safety
/// `cfg` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tricap_solid_new(cfg: *const TricapConfig, out: *mut *mut TricapSolid) -> TricapStatus {
    guard(|| {
        let out = deref!(mut out);
        *out = ptr::null_mut();
        let cfg = &deref!(cfg).0;
        match build_initial_state(cfg) {
            Ok(InitialState::Solid(state)) => match solid::solid_energy(&state) {
                Ok((k, w)) => {
                    *out = Box::into_raw(Box::new(TricapSolid {
                        last: EnergyLedger::solid(state.time, k, w),
                        state,
                        dt: cfg.dt,
                        steps: 0,
                    }));
                    TricapStatus::Ok
                }
                Err(e) => fail_with(&e),
            },
            Ok(InitialState::Fluid(_)) => fail(TricapStatus::WrongScenario, "fluid scenario given to tricap_solid_new"),
            Err(e) => fail_with(&e),
        }
    })
}

/// # Safety
/// `sim` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tricap_solid_free(sim: *mut TricapSolid) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances one step. `dt <= 0` uses the configured step. The external work
/// done during the step goes to `work` when it is not null.
///
/// # Safety
/// `sim` must be a valid handle; `work` null or valid.
#[no_mangle]
pub unsafe extern "C" fn tricap_solid_step(sim: *mut TricapSolid, dt: f64, work: *mut f64) -> TricapStatus {
    guard(|| {
        let sim = deref!(mut sim);
        let dt = if dt > 0.0 {
            dt
        } else {
            match sim.dt {
                TimeStep::Fixed(d) => d,
                TimeStep::Auto => 0.5 * sim.state.stable_dt(),
            }
        };
        let w = match solid::advance_solid(&mut sim.state, dt) {
            Ok(w) => w,
            Err(e) => return fail_with(&e),
        };
        let (k, s) = match solid::solid_energy(&sim.state) {
            Ok(v) => v,
            Err(e) => return fail_with(&e),
        };
        let mut next = EnergyLedger::solid(sim.state.time, k, s);
        let (r, rel) = audit::solid_balance_residual(&sim.last, &next, dt, w);
        next.residual = r;
        next.residual_rel = rel;
        sim.last = next;
        sim.steps += 1;
        if let Some(p) = work.as_mut() {
            *p = w;
        }
        TricapStatus::Ok
    })
}

/// Energy ledger of the current solid state.
///
/// # Safety
/// `sim` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tricap_solid_energy(sim: *const TricapSolid, out: *mut TricapEnergy) -> TricapStatus {
    guard(|| {
        *deref!(mut out) = (&deref!(sim).last).into();
        TricapStatus::Ok
    })
}

/// Displacement of the loaded tip node, as `[ux, uy]`.
///
/// # Safety
/// `sim` must be a valid handle and `out` valid for two writes.
#[no_mangle]
pub unsafe extern "C" fn tricap_solid_tip(sim: *const TricapSolid, out: *mut f64) -> TricapStatus {
    guard(|| {
        let sim = deref!(sim);
        if out.is_null() {
            return fail(TricapStatus::NullPointer, "null out");
        }
        let u = sim.state.tip_displacement();
        std::slice::from_raw_parts_mut(out, 2).copy_from_slice(&u);
        TricapStatus::Ok
    })
}
