//! Initial conditions of the built-in scenarios.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Scenario, ScenarioConfig};
use crate::energy::PhaseTriple;
use crate::error::Result;
use crate::grid::{FaceField, Grid, ScalarField};
use crate::solid::SolidState;
use crate::stepper::FluidState;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Fluid(FluidState),
    Solid(SolidState),
}

/// `1/2 (1 + tanh(2 d / eps))`: equilibrium profile across a flat interface
/// at signed distance `d`.
pub fn tanh_profile(d: f64, eps: f64) -> f64 {
    0.5 * (1.0 + (2.0 * d / eps).tanh())
}

pub fn build_initial_state(cfg: &ScenarioConfig) -> Result<InitialState> {
    let material = cfg.validate()?;
    if cfg.scenario.is_solid() {
        let mesh = cfg.solid.mesh()?;
        let mut s = SolidState::new(mesh, cfg.solid.material, cfg.solid.sides, cfg.solid.load())?;
        if cfg.scenario == Scenario::SolidVibration {
            let a = cfg.init.amplitude;
            let u = (0..mesh.nodes())
                .map(|n| [a * (0.5 * PI * mesh.position(n)[0] / mesh.lx).sin(), 0.0])
                .collect();
            s.set_fields(u, vec![[0.0; 2]; mesh.nodes()]);
        }
        return Ok(InitialState::Solid(s));
    }
    let grid = cfg.grid.build()?;
    let eps = material.epsilon();
    let init = &cfg.init;
    let mut v = FaceField::zeros(&grid);
    let c = match cfg.scenario {
        Scenario::Spinodal => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let a = init.noise;
            if init.binary {
                let c1 = ScalarField::from_fn(&grid, |_, _| 0.5 + rng.gen_range(-a..=a));
                binary(&grid, c1)
            } else {
                let mut c1 = ScalarField::zeros(&grid);
                let mut c2 = ScalarField::zeros(&grid);
                for j in 0..grid.ny {
                    for i in 0..grid.nx {
                        c1.set(i, j, 1.0 / 3.0 + rng.gen_range(-a..=a));
                        c2.set(i, j, 1.0 / 3.0 + rng.gen_range(-a..=a));
                    }
                }
                PhaseTriple::from_two(&grid, c1, c2)
            }
        }
        Scenario::Interface1d => {
            let c1 = ScalarField::from_fn(&grid, |x, _| tanh_profile(x - init.center_x, eps));
            binary(&grid, c1)
        }
        Scenario::Lens => {
            let (cx, cy, r) = (init.center_x, init.center_y, init.radius);
            let c1 = ScalarField::from_fn(&grid, |x, y| tanh_profile(r - (x - cx).hypot(y - cy), eps));
            let mut c2 = ScalarField::zeros(&grid);
            let mut c3 = ScalarField::zeros(&grid);
            for j in 0..grid.ny {
                let below = tanh_profile(cy - grid.y(j), eps);
                for i in 0..grid.nx {
                    let rest = 1.0 - c1.get(i, j);
                    c2.set(i, j, rest * below);
                    c3.set(i, j, rest - rest * below);
                }
            }
            PhaseTriple::new(c1, c2, c3)
        }
        Scenario::SessileDrop => {
            let (cx, cy, r) = (init.center_x, init.center_y, init.radius);
            let c1 = ScalarField::from_fn(&grid, |x, y| tanh_profile(r - (x - cx).hypot(y - cy), eps));
            binary(&grid, c1)
        }
        Scenario::StokesDecay => {
            let (a, ly) = (init.amplitude, grid.ly());
            v = FaceField::from_fn(&grid, |_, y| a * (2.0 * PI * y / ly).sin(), |_, _| 0.0);
            PhaseTriple::uniform(&grid, [1.0, 0.0, 0.0])
        }
        Scenario::SolidVibration | Scenario::SolidTraction => unreachable!("handled above"),
    };
    Ok(InitialState::Fluid(FluidState::new(grid, material, c, v)))
}

/// `c2 = 1 - c1`, `c3 = 0` exactly.
fn binary(grid: &Grid, c1: ScalarField) -> PhaseTriple {
    let c2 = c1.map(|c| 1.0 - c);
    PhaseTriple::new(c1, c2, ScalarField::zeros(grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fluid(cfg: &ScenarioConfig) -> FluidState {
        match build_initial_state(cfg).unwrap() {
            InitialState::Fluid(f) => f,
            _ => panic!("expected fluid"),
        }
    }

    #[test]
    fn spinodal_is_deterministic() {
        let cfg = ScenarioConfig::defaults(Scenario::Spinodal);
        assert_eq!(fluid(&cfg).c, fluid(&cfg).c);
        let mut other = cfg.clone();
        other.seed = 2;
        assert_ne!(fluid(&cfg).c, fluid(&other).c);
    }

    #[test]
    fn interface1d_sums_to_one_exactly() {
        let s = fluid(&ScenarioConfig::defaults(Scenario::Interface1d));
        let [a, b, c] = &s.c.c;
        for ((x, y), z) in a.interior_iter().zip(b.interior_iter()).zip(c.interior_iter()) {
            assert_eq!(z, 0.0);
            assert_eq!(x + y, 1.0);
        }
    }

    #[test]
    fn lens_is_reflection_symmetric() {
        let mut cfg = ScenarioConfig::defaults(Scenario::Lens);
        cfg.grid.nx = 32;
        cfg.grid.ny = 32;
        let s = fluid(&cfg);
        let n = s.grid.nx;
        for p in 0..3 {
            for j in 0..s.grid.ny {
                for i in 0..n {
                    let (a, b) = (s.c.c[p].get(i, j), s.c.c[p].get(n - 1 - i, j));
                    assert!((a - b).abs() < 1e-14);
                }
            }
        }
        assert!(s.c.sum_defect() < 1e-15);
    }

    #[test]
    fn noise_stays_in_range() {
        let s = fluid(&ScenarioConfig::defaults(Scenario::Spinodal));
        for c in &s.c.c {
            assert!(c.interior_iter().all(|v| (v - 1.0 / 3.0).abs() <= 0.0200001));
        }
    }

    #[test]
    fn solid_vibration_profile() {
        match build_initial_state(&ScenarioConfig::defaults(Scenario::SolidVibration)).unwrap() {
            InitialState::Solid(s) => {
                let tip = s.tip_displacement();
                assert!((tip[0] - 1e-3).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }
}
