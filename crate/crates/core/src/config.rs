//! Scenario configuration files.
//!
//! Line-oriented `key = value` pairs grouped under `[section]` headers.
//! `#` starts a comment. Keys before the first header belong to the global
//! section. Unknown keys and repeated keys are errors. Defaults depend on the
//! scenario, so `scenario` must be set in the global section.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, Side};
use crate::material::{Material, MaterialParams};
use crate::wetting::WallEnergyModel;
use crate::solid::{LoadRamp, SideCondition, SolidMaterial, SolidMesh, SolidSides};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Spinodal,
    Interface1d,
    Lens,
    SessileDrop,
    StokesDecay,
    SolidVibration,
    SolidTraction,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Spinodal,
        Scenario::Interface1d,
        Scenario::Lens,
        Scenario::SessileDrop,
        Scenario::StokesDecay,
        Scenario::SolidVibration,
        Scenario::SolidTraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spinodal => "spinodal",
            Scenario::Interface1d => "interface1d",
            Scenario::Lens => "lens",
            Scenario::SessileDrop => "sessile_drop",
            Scenario::StokesDecay => "stokes_decay",
            Scenario::SolidVibration => "solid_vibration",
            Scenario::SolidTraction => "solid_traction",
        }
    }

    pub fn is_solid(self) -> bool {
        matches!(self, Scenario::SolidVibration | Scenario::SolidTraction)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// Half the strictest stability bound, re-evaluated every step.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub x_boundary: Boundary,
    pub y_boundary: Boundary,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny, self.lx, self.ly, self.x_boundary, self.y_boundary)
    }
}

/// Geometry and amplitudes of the initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitConfig {
    /// Half-width of the uniform noise (spinodal).
    pub noise: f64,
    /// Spinodal with `c3 = 0` and `c1 = 1/2 + noise`.
    pub binary: bool,
    /// Drop or lens radius.
    pub radius: f64,
    pub center_x: f64,
    pub center_y: f64,
    /// Velocity amplitude (stokes_decay) or displacement amplitude
    /// (solid_vibration).
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub material: SolidMaterial,
    pub sides: SolidSides,
    pub ramp: f64,
}

impl SolidConfig {
    pub fn mesh(&self) -> Result<SolidMesh> {
        SolidMesh::new(self.nx, self.ny, self.lx, self.ly)
    }

    pub fn load(&self) -> LoadRamp {
        LoadRamp { ramp: self.ramp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    /// Allowed relative energy increase per step.
    pub energy_tol: f64,
    /// Whether the energy monitor is active.
    pub check_energy: bool,
    pub sum_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub grid: GridConfig,
    pub material: MaterialParams,
    pub dt: TimeStep,
    pub end_time: f64,
    /// Exact number of steps; overrides `end_time` when set.
    pub steps: Option<usize>,
    pub snapshot_every: usize,
    pub out_dir: PathBuf,
    pub flow: bool,
    pub phase_tol: f64,
    pub solve_tol: f64,
    pub init: InitConfig,
    pub solid: SolidConfig,
    pub monitor: MonitorConfig,
}

impl ScenarioConfig {
    /// Defaults for a scenario.
    pub fn defaults(scenario: Scenario) -> Self {
        use Boundary::{Periodic, Wall};
        let (nx, ny, lx, ly, xb, yb) = match scenario {
            Scenario::Spinodal | Scenario::StokesDecay => (64, 64, 1.0, 1.0, Periodic, Periodic),
            Scenario::Interface1d => (256, 4, 1.0, 1.0 / 64.0, Wall, Periodic),
            Scenario::Lens | Scenario::SessileDrop => (128, 128, 1.0, 1.0, Periodic, Wall),
            Scenario::SolidVibration | Scenario::SolidTraction => (8, 8, 1.0, 1.0, Periodic, Periodic),
        };
        let mut material = MaterialParams::default();
        let (dt, end_time) = match scenario {
            Scenario::Spinodal => (TimeStep::Fixed(2e-4), 0.1),
            Scenario::Interface1d => {
                material.epsilon = 0.04;
                material.mobility = 1e-3;
                material.eta = 1.0;
                (TimeStep::Fixed(1e-3), 1.0)
            }
            Scenario::Lens => {
                material.epsilon = 0.03;
                material.mobility = 1e-3;
                material.eta = 1.0;
                (TimeStep::Auto, 15.0)
            }
            Scenario::SessileDrop => {
                material.epsilon = 0.03;
                material.mobility = 5e-2;
                material.eta = 1.0;
                (TimeStep::Auto, 20.0)
            }
            Scenario::StokesDecay => (TimeStep::Fixed(1e-3), 0.5),
            Scenario::SolidVibration => (TimeStep::Auto, 20.0),
            Scenario::SolidTraction => (TimeStep::Auto, 1.0),
        };
        let (radius, cx, cy) = match scenario {
            Scenario::Lens => (0.2, 0.5, 0.5),
            Scenario::SessileDrop => (0.25, 0.5, 0.0),
            _ => (0.25, 0.5, 0.5),
        };
        let amplitude = match scenario {
            Scenario::StokesDecay => 1e-2,
            Scenario::SolidVibration => 1e-3,
            _ => 0.0,
        };
        let sides = match scenario {
            Scenario::SolidVibration => SolidSides {
                left: SideCondition::Roller,
                right: SideCondition::Free,
                bottom: SideCondition::Roller,
                top: SideCondition::Roller,
            },
            Scenario::SolidTraction => SolidSides {
                left: SideCondition::Roller,
                right: SideCondition::Traction([0.2, 0.05]),
                bottom: SideCondition::Roller,
                top: SideCondition::Free,
            },
            _ => SolidSides::default(),
        };
        let (snx, sny, slx, sly) = match scenario {
            Scenario::SolidVibration => (40, 4, 1.0, 0.25),
            _ => (16, 4, 1.0, 0.25),
        };
        ScenarioConfig {
            scenario,
            seed: 1,
            grid: GridConfig {
                nx,
                ny,
                lx,
                ly,
                x_boundary: xb,
                y_boundary: yb,
            },
            material,
            dt,
            end_time,
            steps: None,
            snapshot_every: 100,
            out_dir: PathBuf::from("out"),
            flow: true,
            phase_tol: 1e-12,
            solve_tol: 1e-12,
            init: InitConfig {
                noise: 0.01,
                binary: false,
                radius,
                center_x: cx,
                center_y: cy,
                amplitude,
            },
            solid: SolidConfig {
                nx: snx,
                ny: sny,
                lx: slx,
                ly: sly,
                material: SolidMaterial {
                    mu: 1.0,
                    lambda: 2.0,
                    rho0: 1.0,
                },
                sides,
                ramp: if scenario == Scenario::SolidTraction { 0.5 } else { 0.0 },
            },
            monitor: MonitorConfig {
                energy_tol: 1e-10,
                check_energy: matches!(scenario, Scenario::Spinodal | Scenario::Interface1d | Scenario::StokesDecay),
                sum_tol: 1e-8,
            },
        }
    }

    /// Checks every invariant and returns the validated fluid material.
    pub fn validate(&self) -> Result<Material> {
        if !(self.end_time > 0.0) || !self.end_time.is_finite() {
            return Err(Error::invalid("end_time", "must be positive"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::invalid("snapshot_every", "must be at least 1"));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::invalid("dt", "must be positive or `auto`"));
            }
        }
        if self.steps == Some(0) {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        for (name, v) in [("phase_tol", self.phase_tol), ("solve_tol", self.solve_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(name, "must lie in (0, 1)"));
            }
        }
        if self.scenario.is_solid() {
            self.solid.mesh()?;
            self.solid.material.validate()?;
            if !(self.solid.ramp >= 0.0) {
                return Err(Error::invalid("solid.ramp", "must be non-negative"));
            }
        } else {
            self.grid.build()?;
        }
        self.material.validate()
    }

    pub fn stepper_options(&self) -> crate::stepper::StepperOptions {
        crate::stepper::StepperOptions {
            flow: self.flow,
            phase: self.scenario != Scenario::StokesDecay,
            phase_tol: self.phase_tol,
            solve_tol: self.solve_tol,
            ..Default::default()
        }
    }
}

/// Text shown by `--help`.
pub const CONFIG_HELP: &str = "\
Config file: `key = value` lines, `[section]` headers, `#` comments.
global:     scenario (spinodal|interface1d|lens|sessile_drop|stokes_decay|
            solid_vibration|solid_traction), seed (1)
[grid]      nx, ny, lx, ly, x_boundary, y_boundary (periodic|wall)
[time]      dt (number or auto), end_time, steps, snapshot_every (100)
[material]  gamma12, gamma13, gamma23 (1), epsilon, mobility, rho (1), eta
[wall]      gamma_s1, gamma_s2, gamma_s3 (0): all walls
            contact_angle (degrees, through phase 1): sets gamma_s from
            Young's law with gamma_s3 = 0
[wall.left|right|bottom|top]  same keys, one side
[init]      noise (0.01), binary (false), radius, center_x, center_y, amplitude
[solver]    flow (true), phase_tol (1e-12), solve_tol (1e-12)
[monitor]   energy_tol (1e-10), check_energy, sum_tol (1e-8)
[output]    dir (out)
[solid]     nx, ny, lx, ly, mu (1), lambda (2), rho0 (1), ramp,
            left|right|bottom|top (free|roller|traction),
            <side>_traction_x, <side>_traction_y
Defaults of grid, time and material depend on the scenario.";

struct Entry {
    line: usize,
    value: String,
}

fn parse_value<T: FromStr>(e: &Entry, key: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    e.value.parse::<T>().map_err(|err| Error::Parse {
        line: e.line,
        message: format!("bad value for `{key}`: {err}"),
    })
}

fn parse_bool(e: &Entry, key: &str) -> Result<bool> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse {
            line: e.line,
            message: format!("bad value for `{key}`: expected true or false"),
        }),
    }
}

fn parse_boundary(e: &Entry, key: &str) -> Result<Boundary> {
    match e.value.as_str() {
        "periodic" => Ok(Boundary::Periodic),
        "wall" => Ok(Boundary::Wall),
        _ => Err(Error::Parse {
            line: e.line,
            message: format!("bad value for `{key}`: expected periodic or wall"),
        }),
    }
}

fn side_from(name: &str) -> Option<Side> {
    Side::ALL.into_iter().find(|s| s.name() == name)
}

/// Marks a `contact_angle` entry among the per-phase wall energies.
const CONTACT_ANGLE: usize = 3;

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    // (section, key) -> entry, in file order
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    let mut entries: Vec<(String, String, Entry)> = Vec::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty section name".into(),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                message: "missing key".into(),
            });
        }
        let id = (section.clone(), key.to_string());
        if let Some(first) = seen.get(&id) {
            let shown = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{shown}` (first set on line {first})"),
            });
        }
        seen.insert(id, line);
        entries.push((
            section.clone(),
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        ));
    }

    let scenario_entry = entries.iter().find(|(s, k, _)| s.is_empty() && k == "scenario");
    let scenario = match scenario_entry {
        Some((_, _, e)) => e.value.parse::<Scenario>().map_err(|m| Error::Parse { line: e.line, message: m })?,
        None => {
            return Err(Error::Parse {
                line: 0,
                message: "missing required key `scenario`".into(),
            })
        }
    };
    let mut cfg = ScenarioConfig::defaults(scenario);
    // side-specific wall entries override the [wall] defaults
    let mut wall_all: Vec<(usize, f64, &Entry)> = Vec::new();
    let mut wall_side: Vec<(Side, usize, f64, &Entry)> = Vec::new();

    for (sec, key, e) in &entries {
        let unknown = || Error::UnknownKey {
            line: e.line,
            key: if sec.is_empty() { key.clone() } else { format!("{sec}.{key}") },
        };
        let k = key.as_str();
        match sec.as_str() {
            "" => match k {
                "scenario" => {}
                "seed" => cfg.seed = parse_value(e, k)?,
                _ => return Err(unknown()),
            },
            "grid" => match k {
                "nx" => cfg.grid.nx = parse_value(e, k)?,
                "ny" => cfg.grid.ny = parse_value(e, k)?,
                "lx" => cfg.grid.lx = parse_value(e, k)?,
                "ly" => cfg.grid.ly = parse_value(e, k)?,
                "x_boundary" => cfg.grid.x_boundary = parse_boundary(e, k)?,
                "y_boundary" => cfg.grid.y_boundary = parse_boundary(e, k)?,
                _ => return Err(unknown()),
            },
            "time" => match k {
                "dt" => {
                    cfg.dt = if e.value == "auto" {
                        TimeStep::Auto
                    } else {
                        TimeStep::Fixed(parse_value(e, k)?)
                    }
                }
                "end_time" => cfg.end_time = parse_value(e, k)?,
                "steps" => cfg.steps = Some(parse_value(e, k)?),
                "snapshot_every" => cfg.snapshot_every = parse_value(e, k)?,
                _ => return Err(unknown()),
            },
            "material" => {
                let m = &mut cfg.material;
                let slot = match k {
                    "gamma12" => &mut m.gamma12,
                    "gamma13" => &mut m.gamma13,
                    "gamma23" => &mut m.gamma23,
                    "epsilon" => &mut m.epsilon,
                    "mobility" => &mut m.mobility,
                    "rho" => &mut m.rho,
                    "eta" => &mut m.eta,
                    _ => return Err(unknown()),
                };
                *slot = parse_value(e, k)?;
            }
            "init" => match k {
                "noise" => cfg.init.noise = parse_value(e, k)?,
                "binary" => cfg.init.binary = parse_bool(e, k)?,
                "radius" => cfg.init.radius = parse_value(e, k)?,
                "center_x" => cfg.init.center_x = parse_value(e, k)?,
                "center_y" => cfg.init.center_y = parse_value(e, k)?,
                "amplitude" => cfg.init.amplitude = parse_value(e, k)?,
                _ => return Err(unknown()),
            },
            "solver" => match k {
                "flow" => cfg.flow = parse_bool(e, k)?,
                "phase_tol" => cfg.phase_tol = parse_value(e, k)?,
                "solve_tol" => cfg.solve_tol = parse_value(e, k)?,
                _ => return Err(unknown()),
            },
            "monitor" => match k {
                "energy_tol" => cfg.monitor.energy_tol = parse_value(e, k)?,
                "check_energy" => cfg.monitor.check_energy = parse_bool(e, k)?,
                "sum_tol" => cfg.monitor.sum_tol = parse_value(e, k)?,
                _ => return Err(unknown()),
            },
            "output" => match k {
                "dir" => cfg.out_dir = PathBuf::from(&e.value),
                _ => return Err(unknown()),
            },
            "solid" => apply_solid(&mut cfg.solid, k, e).map_err(|err| match err {
                Some(err) => err,
                None => unknown(),
            })?,
            s if s == "wall" || s.starts_with("wall.") => {
                let phase = match k {
                    "gamma_s1" => 0,
                    "gamma_s2" => 1,
                    "gamma_s3" => 2,
                    "contact_angle" => CONTACT_ANGLE,
                    _ => return Err(unknown()),
                };
                let v: f64 = parse_value(e, k)?;
                if s == "wall" {
                    wall_all.push((phase, v, e));
                } else {
                    let side = side_from(&s[5..]).ok_or_else(|| Error::Parse {
                        line: e.line,
                        message: format!("unknown wall side `{}`", &s[5..]),
                    })?;
                    wall_side.push((side, phase, v, e));
                }
            }
            _ => {
                return Err(Error::Parse {
                    line: e.line,
                    message: format!("unknown section `[{sec}]`"),
                })
            }
        }
    }
    let gamma12 = cfg.material.gamma12;
    let set_wall = |model: &mut WallEnergyModel, phase: usize, v: f64| {
        if phase == CONTACT_ANGLE {
            *model = WallEnergyModel::young(v.to_radians(), gamma12);
        } else {
            model.gamma_s[phase] = v;
        }
    };
    for &(phase, v, _) in &wall_all {
        for side in Side::ALL {
            set_wall(cfg.material.walls.side_mut(side), phase, v);
        }
    }
    for &(side, phase, v, _) in &wall_side {
        set_wall(cfg.material.walls.side_mut(side), phase, v);
    }
    Ok(cfg)
}

/// `Ok(())` on success, `Err(None)` for an unknown key.
fn apply_solid(s: &mut SolidConfig, k: &str, e: &Entry) -> std::result::Result<(), Option<Error>> {
    let bad = |err: Error| Some(err);
    match k {
        "nx" => s.nx = parse_value(e, k).map_err(bad)?,
        "ny" => s.ny = parse_value(e, k).map_err(bad)?,
        "lx" => s.lx = parse_value(e, k).map_err(bad)?,
        "ly" => s.ly = parse_value(e, k).map_err(bad)?,
        "mu" => s.material.mu = parse_value(e, k).map_err(bad)?,
        "lambda" => s.material.lambda = parse_value(e, k).map_err(bad)?,
        "rho0" => s.material.rho0 = parse_value(e, k).map_err(bad)?,
        "ramp" => s.ramp = parse_value(e, k).map_err(bad)?,
        _ => {
            if let Some(side) = side_from(k) {
                let cond = solid_side_mut(&mut s.sides, side);
                *cond = match e.value.as_str() {
                    "free" => SideCondition::Free,
                    "roller" => SideCondition::Roller,
                    "traction" => match *cond {
                        SideCondition::Traction(t) => SideCondition::Traction(t),
                        _ => SideCondition::Traction([0.0, 0.0]),
                    },
                    _ => {
                        return Err(Some(Error::Parse {
                            line: e.line,
                            message: format!("bad value for `{k}`: expected free, roller or traction"),
                        }))
                    }
                };
                return Ok(());
            }
            let (side_name, comp) = match k.rsplit_once("_traction_") {
                Some((sn, "x")) => (sn, 0),
                Some((sn, "y")) => (sn, 1),
                _ => return Err(None),
            };
            let side = side_from(side_name).ok_or(None)?;
            let v: f64 = parse_value(e, k).map_err(bad)?;
            let cond = solid_side_mut(&mut s.sides, side);
            let mut t = match *cond {
                SideCondition::Traction(t) => t,
                _ => [0.0, 0.0],
            };
            t[comp] = v;
            // a traction value implies a traction side unless set otherwise
            if !matches!(*cond, SideCondition::Roller) {
                *cond = SideCondition::Traction(t);
            }
        }
    }
    Ok(())
}

fn solid_side_mut(s: &mut SolidSides, side: Side) -> &mut SideCondition {
    match side {
        Side::Left => &mut s.left,
        Side::Right => &mut s.right,
        Side::Bottom => &mut s.bottom,
        Side::Top => &mut s.top,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config("scenario = spinodal\n[grid]\nnx = 32\nny = 32\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::Spinodal);
        assert_eq!(cfg.grid.nx, 32);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.material, MaterialParams::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn negative_epsilon_is_invalid_parameter() {
        let cfg = parse_config("scenario = spinodal\n[material]\nepsilon = -1\n").unwrap();
        assert_eq!(cfg.validate().unwrap_err().code(), "InvalidParameter");
    }

    #[test]
    fn duplicate_key_names_key_and_line() {
        let err = parse_config("scenario = lens\n[grid]\nnx = 8\n\nnx = 16\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("grid.nx"), "{message}");
                assert!(message.contains("line 3"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn same_key_in_two_sections_is_fine() {
        let cfg = parse_config("scenario = solid_traction\n[grid]\nnx = 8\n[solid]\nnx = 10\n").unwrap();
        assert_eq!(cfg.grid.nx, 8);
        assert_eq!(cfg.solid.nx, 10);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config("scenario = spinodal\n[material]\nviscosity = 1\n").unwrap_err();
        assert!(matches!(err, Error::UnknownKey { line: 3, ref key } if key == "material.viscosity"));
    }

    #[test]
    fn missing_scenario_and_bad_lines() {
        assert_eq!(parse_config("[grid]\nnx = 8\n").unwrap_err().code(), "ParseError");
        assert!(matches!(parse_config("scenario = lens\nnonsense\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(matches!(parse_config("scenario = foo\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(parse_config("scenario = lens\n[grid]\nnx = eight\n").unwrap_err(), Error::Parse { line: 3, .. }));
    }

    #[test]
    fn wall_sections() {
        let text = "scenario = sessile_drop\n[wall]\ngamma_s1 = 0.1\n[wall.bottom]\ngamma_s1 = -0.25\ngamma_s2 = 0.25\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.material.walls.bottom.gamma_s, [-0.25, 0.25, 0.0]);
        assert_eq!(cfg.material.walls.top.gamma_s, [0.1, 0.0, 0.0]);
    }

    #[test]
    fn contact_angle_key_uses_young_energies() {
        let text = "scenario = sessile_drop\n[material]\ngamma12 = 2\n[wall]\ncontact_angle = 60\n[wall.top]\ncontact_angle = 90\n";
        let cfg = parse_config(text).unwrap();
        let g = cfg.material.walls.bottom.gamma_s;
        assert!((g[0] + 0.5).abs() < 1e-12 && (g[1] - 0.5).abs() < 1e-12 && g[2] == 0.0, "{g:?}");
        assert!(cfg.material.walls.top.gamma_s[0].abs() < 1e-12);
    }

    #[test]
    fn time_and_solid_keys() {
        let text = "scenario = solid_traction\n[time]\ndt = auto\nsteps = 10\n[solid]\ntop = roller\nright_traction_x = 0.5\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.dt, TimeStep::Auto);
        assert_eq!(cfg.steps, Some(10));
        assert_eq!(cfg.solid.sides.top, SideCondition::Roller);
        assert_eq!(cfg.solid.sides.right, SideCondition::Traction([0.5, 0.05]));
        cfg.validate().unwrap();
    }

    #[test]
    fn invariants_checked() {
        let bad_cadence = parse_config("scenario = spinodal\n[time]\nsnapshot_every = 0\n").unwrap();
        assert!(bad_cadence.validate().is_err());
        let bad_end = parse_config("scenario = spinodal\n[time]\nend_time = 0\n").unwrap();
        assert!(bad_end.validate().is_err());
        let spreading = parse_config("scenario = lens\n[material]\ngamma12 = 3\n").unwrap();
        assert_eq!(spreading.validate().unwrap_err().code(), "TotalSpreading");
    }

    #[test]
    fn young_wall_energies() {
        let w = WallEnergyModel::young(std::f64::consts::FRAC_PI_3, 2.0);
        assert!(((w.gamma_s[1] - w.gamma_s[0]) / 2.0 - 0.5).abs() < 1e-15);
    }
}
