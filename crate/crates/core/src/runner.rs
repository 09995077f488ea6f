//! Time loop, invariant monitors and run artifacts.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::audit::{self, CsvWriter, EnergyLedger};
use crate::config::{Scenario, ScenarioConfig, TimeStep};
use crate::error::{Error, Result};
use crate::output::{self, Manifest, MANIFEST_NAME};
use crate::scenario::{build_initial_state, InitialState};
use crate::solid::{self, SolidState};
use crate::stepper::{self, FluidState, StepperOptions};

pub const ENERGY_CSV: &str = "energy.csv";
pub const SOLID_CSV: &str = "solid.csv";

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.steps {
            cfg.steps = Some(n);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub steps: usize,
    pub final_time: f64,
    pub out_dir: PathBuf,
    /// Last snapshot written (the final state).
    pub final_snapshot: PathBuf,
    pub ledger: Vec<EnergyLedger>,
    pub max_sum_defect: f64,
    /// Largest `|m_i(t) - m_i(0)| / |m_i(0)|` over phases with nonzero mass.
    pub max_mass_drift: f64,
    /// Largest `(E^{n+1} - E^n) / |E^n|` over all steps.
    pub max_energy_increase: f64,
    /// Largest `max |v|` after projection over all steps.
    pub max_velocity: f64,
    /// Largest `max |c3|` over all steps.
    pub max_c3: f64,
}

/// A failed run: the error plus where it happened.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub scenario: Option<Scenario>,
    pub step: usize,
    pub time: f64,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scenario {
            Some(s) => write!(f, "scenario={s} step={} t={:e}: {}", self.step, self.time, self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure {
            error,
            scenario: None,
            step: 0,
            time: 0.0,
        }
    }
}

struct Progress {
    scenario: Scenario,
    step: usize,
    time: f64,
}

impl Progress {
    fn fail(&self, error: Error) -> RunFailure {
        RunFailure {
            error,
            scenario: Some(self.scenario),
            step: self.step,
            time: self.time,
        }
    }
}

/// Time step for a fluid state under `cfg`, clamped so the run ends on
/// `end` when stepping by end time.
fn fluid_dt(cfg: &ScenarioConfig, state: &FluidState, opts: &StepperOptions, end: Option<f64>) -> f64 {
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => {
            let lim = stepper::stability_limits(state, opts).strictest();
            if lim.is_finite() {
                0.5 * lim
            } else {
                cfg.end_time / 100.0
            }
        }
    };
    match end {
        Some(end) => dt.min(end - state.time),
        None => dt,
    }
}

fn keep_going(cfg: &ScenarioConfig, step: usize, time: f64) -> bool {
    match cfg.steps {
        Some(n) => step < n,
        None => time < cfg.end_time * (1.0 - 1e-12),
    }
}

/// Runs a scenario and writes `energy.csv`, snapshots and the manifest into
/// `cfg.out_dir`.
pub fn run(cfg: &ScenarioConfig) -> std::result::Result<RunSummary, RunFailure> {
    let started = Instant::now();
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(Error::from)?;
    let initial = build_initial_state(cfg)?;
    let mut manifest = Manifest::default();
    manifest.push("scenario", cfg.scenario);
    manifest.push("seed", cfg.seed);
    let result = match initial {
        InitialState::Fluid(state) => run_fluid(cfg, state, &mut manifest),
        InitialState::Solid(state) => run_solid(cfg, state, &mut manifest),
    };
    match &result {
        Ok(_) => manifest.push("status", "ok"),
        Err(f) => {
            manifest.push("status", "failed");
            manifest.push("reason", f.error.code());
            manifest.push("message", f.to_string().replace('\n', " "));
        }
    }
    manifest.push("wall_seconds", format!("{:.3}", started.elapsed().as_secs_f64()));
    let written = fs::write(cfg.out_dir.join(MANIFEST_NAME), manifest.text()).map_err(Error::from);
    let summary = result?;
    written?;
    Ok(summary)
}

fn open_csv(dir: &Path) -> Result<CsvWriter<BufWriter<File>>> {
    CsvWriter::new(BufWriter::new(File::create(dir.join(ENERGY_CSV))?))
}

fn run_fluid(cfg: &ScenarioConfig, mut state: FluidState, manifest: &mut Manifest) -> std::result::Result<RunSummary, RunFailure> {
    let dir = cfg.out_dir.clone();
    let opts = cfg.stepper_options();
    let mut at = Progress {
        scenario: cfg.scenario,
        step: 0,
        time: 0.0,
    };
    let mut csv = open_csv(&dir).map_err(|e| at.fail(e))?;
    let mut prev = audit::ledger(&state);
    csv.push(&prev).map_err(|e| at.fail(e))?;
    let mut rows = vec![prev];
    output::write_fluid_snapshot(&dir, &state, 0).map_err(|e| at.fail(e))?;
    let mut last_snapshot = 0;
    let m0 = state.c.masses(&state.grid);
    let mut summary = RunSummary {
        scenario: cfg.scenario,
        steps: 0,
        final_time: 0.0,
        out_dir: dir.clone(),
        final_snapshot: PathBuf::new(),
        ledger: Vec::new(),
        max_sum_defect: state.c.sum_defect(),
        max_mass_drift: 0.0,
        max_energy_increase: f64::NEG_INFINITY,
        max_velocity: state.v.max_abs(),
        max_c3: state.c.c[2].interior_iter().fold(0.0, |m, v| m.max(v.abs())),
    };
    let end = cfg.steps.is_none().then_some(cfg.end_time);
    let mut dt = 0.0;
    while keep_going(cfg, at.step, state.time) {
        dt = fluid_dt(cfg, &state, &opts, end);
        stepper::step(&mut state, dt, &opts).map_err(|e| at.fail(e))?;
        at.step += 1;
        at.time = state.time;

        if state.c.c.iter().any(|c| c.has_non_finite()) || state.v.has_non_finite() {
            return Err(at.fail(Error::InvariantBreach {
                time: state.time,
                message: "non-finite field value".into(),
            }));
        }
        let defect = state.c.sum_defect();
        summary.max_sum_defect = summary.max_sum_defect.max(defect);
        if defect > cfg.monitor.sum_tol {
            return Err(at.fail(Error::InvariantBreach {
                time: state.time,
                message: format!("sum constraint defect {defect:e}"),
            }));
        }
        let m = state.c.masses(&state.grid);
        for p in 0..3 {
            if m0[p].abs() > 0.0 {
                summary.max_mass_drift = summary.max_mass_drift.max((m[p] - m0[p]).abs() / m0[p].abs());
            }
        }
        summary.max_velocity = summary.max_velocity.max(state.v.max_abs());
        summary.max_c3 = summary.max_c3.max(state.c.c[2].interior_iter().fold(0.0, |m, v| m.max(v.abs())));

        let mut next = audit::ledger(&state);
        let (r, rel) = audit::balance_residual(&prev, &next, dt);
        next.residual = r;
        next.residual_rel = rel;
        csv.push(&next).map_err(|e| at.fail(e))?;
        rows.push(next);
        let increase = (next.total() - prev.total()) / prev.total().abs().max(f64::MIN_POSITIVE);
        summary.max_energy_increase = summary.max_energy_increase.max(increase);
        if cfg.monitor.check_energy && next.total() > prev.total() + cfg.monitor.energy_tol * prev.total().abs() {
            return Err(at.fail(Error::InvariantBreach {
                time: state.time,
                message: format!("energy increased from {:e} to {:e}", prev.total(), next.total()),
            }));
        }
        prev = next;
        if at.step.is_multiple_of(cfg.snapshot_every) {
            output::write_fluid_snapshot(&dir, &state, at.step).map_err(|e| at.fail(e))?;
            last_snapshot = at.step;
        }
    }
    if last_snapshot != at.step || at.step == 0 {
        output::write_fluid_snapshot(&dir, &state, at.step).map_err(|e| at.fail(e))?;
    }
    csv.flush().map_err(|e| at.fail(e))?;
    summary.steps = at.step;
    summary.final_time = state.time;
    summary.final_snapshot = dir.join(output::snapshot_name(at.step));
    summary.ledger = rows;
    let g = &state.grid;
    manifest.push("grid", format!("{}x{}", g.nx, g.ny));
    manifest.push("steps", summary.steps);
    manifest.push("final_time", format!("{:e}", summary.final_time));
    manifest.push("last_dt", format!("{dt:e}"));
    manifest.push("energy_initial", format!("{:e}", summary.ledger[0].total()));
    manifest.push("energy_final", format!("{:e}", prev.total()));
    manifest.push("max_energy_increase_rel", format!("{:e}", summary.max_energy_increase));
    manifest.push("max_sum_defect", format!("{:e}", summary.max_sum_defect));
    manifest.push("max_mass_drift_rel", format!("{:e}", summary.max_mass_drift));
    manifest.push("max_velocity", format!("{:e}", summary.max_velocity));
    manifest.push("energy_csv", ENERGY_CSV);
    manifest.push("final_snapshot", output::snapshot_name(at.step));
    Ok(summary)
}

fn run_solid(cfg: &ScenarioConfig, mut state: SolidState, manifest: &mut Manifest) -> std::result::Result<RunSummary, RunFailure> {
    let dir = cfg.out_dir.clone();
    let mut at = Progress {
        scenario: cfg.scenario,
        step: 0,
        time: 0.0,
    };
    let solid_row = |s: &SolidState| -> Result<EnergyLedger> {
        let (k, w) = solid::solid_energy(s)?;
        Ok(EnergyLedger::solid(s.time, k, w))
    };
    let mut csv = open_csv(&dir).map_err(|e| at.fail(e))?;
    let mut tip = BufWriter::new(File::create(dir.join(SOLID_CSV)).map_err(|e| at.fail(e.into()))?);
    let tip_row = |w: &mut BufWriter<File>, s: &SolidState, work: f64| -> Result<()> {
        let u = s.tip_displacement();
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", s.time, u[0], u[1], work)?;
        Ok(())
    };
    writeln!(tip, "t,tip_ux,tip_uy,external_work").map_err(|e| at.fail(e.into()))?;
    tip_row(&mut tip, &state, 0.0).map_err(|e| at.fail(e))?;
    let mut prev = solid_row(&state).map_err(|e| at.fail(e))?;
    csv.push(&prev).map_err(|e| at.fail(e))?;
    let mut rows = vec![prev];
    output::write_solid_snapshot(&dir, &state, 0).map_err(|e| at.fail(e))?;
    let mut last_snapshot = 0;
    let mut work_total = 0.0;
    let mut dt = 0.0;
    while keep_going(cfg, at.step, state.time) {
        dt = match cfg.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Auto => 0.5 * state.stable_dt(),
        };
        if cfg.steps.is_none() {
            dt = dt.min(cfg.end_time - state.time);
        }
        let work = solid::advance_solid(&mut state, dt).map_err(|e| at.fail(e))?;
        work_total += work;
        at.step += 1;
        at.time = state.time;
        if state.u.iter().chain(&state.udot).any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(at.fail(Error::InvariantBreach {
                time: state.time,
                message: "non-finite displacement or velocity".into(),
            }));
        }
        let mut next = solid_row(&state).map_err(|e| at.fail(e))?;
        let (r, rel) = audit::solid_balance_residual(&prev, &next, dt, work);
        next.residual = r;
        next.residual_rel = rel;
        csv.push(&next).map_err(|e| at.fail(e))?;
        tip_row(&mut tip, &state, work_total).map_err(|e| at.fail(e))?;
        rows.push(next);
        prev = next;
        if at.step.is_multiple_of(cfg.snapshot_every) {
            output::write_solid_snapshot(&dir, &state, at.step).map_err(|e| at.fail(e))?;
            last_snapshot = at.step;
        }
    }
    if last_snapshot != at.step || at.step == 0 {
        output::write_solid_snapshot(&dir, &state, at.step).map_err(|e| at.fail(e))?;
    }
    csv.flush().map_err(|e| at.fail(e))?;
    tip.flush().map_err(|e| at.fail(e.into()))?;
    let e0 = rows[0].total();
    manifest.push("mesh", format!("{}x{}", state.mesh.nx, state.mesh.ny));
    manifest.push("steps", at.step);
    manifest.push("final_time", format!("{:e}", state.time));
    manifest.push("last_dt", format!("{dt:e}"));
    manifest.push("energy_initial", format!("{e0:e}"));
    manifest.push("energy_final", format!("{:e}", prev.total()));
    manifest.push("external_work", format!("{work_total:e}"));
    manifest.push("energy_csv", ENERGY_CSV);
    manifest.push("solid_csv", SOLID_CSV);
    manifest.push("final_snapshot", output::snapshot_name(at.step));
    Ok(RunSummary {
        scenario: cfg.scenario,
        steps: at.step,
        final_time: state.time,
        out_dir: dir.clone(),
        final_snapshot: dir.join(output::snapshot_name(at.step)),
        ledger: rows,
        max_sum_defect: 0.0,
        max_mass_drift: 0.0,
        max_energy_increase: f64::NEG_INFINITY,
        max_velocity: 0.0,
        max_c3: 0.0,
    })
}
