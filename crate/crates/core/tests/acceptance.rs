//! Acceptance checks. Each criterion prints one `PASS` or `FAIL` line; the
//! process exits nonzero if any fails.

use std::cell::OnceCell;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tricap::audit::identity_check;
use tricap::config::{Scenario, ScenarioConfig, TimeStep};
use tricap::energy::{free_energy, variational_derivative, PhaseTriple};
use tricap::grid::{Grid, ScalarField};
use tricap::material::MaterialParams;
use tricap::measure::{contact_angle, interface_energy, lens_angles};
use tricap::output::read_snapshot;
use tricap::runner::{run, RunSummary};
use tricap::scenario::{build_initial_state, tanh_profile, InitialState};
use tricap::solid::{self, first_piola, strain_energy_density, Mat2, SolidMaterial, SolidState};
use tricap::wetting::WallEnergyModel;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_in(cfg: &mut ScenarioConfig, dir: &Path) -> Result<RunSummary, String> {
    cfg.out_dir = dir.to_path_buf();
    run(cfg).map_err(|f| f.to_string())
}

fn mean_abs_residual(s: &RunSummary) -> f64 {
    let rows = &s.ledger[1..];
    rows.iter().map(|r| r.residual.abs()).sum::<f64>() / rows.len() as f64
}

struct Spinodal {
    coarse: RunSummary,
    fine: RunSummary,
}

fn spinodal_runs(dir: &Path) -> Result<Spinodal, String> {
    let mut coarse = ScenarioConfig::defaults(Scenario::Spinodal);
    coarse.dt = TimeStep::Fixed(2e-4);
    coarse.steps = Some(500);
    coarse.snapshot_every = 500;
    let mut fine = coarse.clone();
    fine.dt = TimeStep::Fixed(1e-4);
    fine.steps = Some(1000);
    fine.snapshot_every = 1000;
    Ok(Spinodal {
        coarse: run_in(&mut coarse, &dir.join("coarse"))?,
        fine: run_in(&mut fine, &dir.join("fine"))?,
    })
}

fn energy_law(sp: &Spinodal) -> Outcome {
    let rows = &sp.coarse.ledger;
    let worst = rows
        .windows(2)
        .map(|w| (w[1].total() - w[0].total()) / w[0].total().abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let (rc, rf) = (mean_abs_residual(&sp.coarse), mean_abs_residual(&sp.fine));
    let ratio = rc / rf;
    check(
        worst <= 1e-10 && ratio >= 1.8 && rows.len() == 501,
        format!("max relative increase {worst:.3e}, mean |r| {rc:.3e} -> {rf:.3e} (ratio {ratio:.3})"),
    )
}

fn sum_and_mass(sp: &Spinodal) -> Outcome {
    let s = &sp.coarse;
    check(
        s.max_sum_defect <= 1e-10 && s.max_mass_drift <= 1e-12,
        format!("max |1 - sum c| {:.3e}, max relative mass drift {:.3e}", s.max_sum_defect, s.max_mass_drift),
    )
}

fn variational_gradient() -> Outcome {
    let m = MaterialParams {
        gamma12: 1.0,
        gamma13: 1.4,
        gamma23: 0.7,
        epsilon: 0.1,
        ..Default::default()
    }
    .validate()
    .map_err(|e| e.to_string())?;
    let grid = Grid::periodic(32, 1.0).map_err(|e| e.to_string())?;
    let sigma = m.sigma();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        // smooth random fields: a few low Fourier modes each
        let mut smooth = |base: f64, amp: f64| {
            let modes: Vec<(f64, f64, f64, f64)> = (0..4)
                .map(|_| {
                    (
                        rng.gen_range(1..4) as f64,
                        rng.gen_range(1..4) as f64,
                        rng.gen_range(0.0..2.0 * PI),
                        rng.gen_range(-amp..amp),
                    )
                })
                .collect();
            ScalarField::from_fn(&grid, move |x, y| {
                base + modes.iter().map(|&(kx, ky, ph, a)| a * (2.0 * PI * (kx * x + ky * y) + ph).sin()).sum::<f64>()
            })
        };
        let mut c = PhaseTriple::new(smooth(0.3, 0.05), smooth(0.4, 0.05), smooth(0.3, 0.05));
        c.sync(&grid, &m);
        let d = [smooth(0.0, 1.0), smooth(0.0, 1.0), smooth(0.0, 1.0)];
        let shifted = |s: f64| {
            let f = |p: usize| {
                let mut out = c.c[p].clone();
                for j in 0..grid.ny {
                    for i in 0..grid.nx {
                        out.set(i, j, c.c[p].get(i, j) + s * d[p].get(i, j));
                    }
                }
                out
            };
            let mut t = PhaseTriple::new(f(0), f(1), f(2));
            t.sync(&grid, &m);
            t
        };
        let h = 1e-5;
        let numeric = (free_energy(&grid, &shifted(h), &m) - free_energy(&grid, &shifted(-h), &m)) / (2.0 * h);
        let mut analytic = 0.0;
        for p in 0..3 {
            let v = variational_derivative(&grid, &c.c[p], sigma[p], &m);
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    analytic += v.get(i, j) * d[p].get(i, j) * grid.cell_area();
                }
            }
        }
        worst = worst.max((numeric - analytic).abs() / analytic.abs());
    }
    check(worst <= 1e-6, format!("max relative mismatch {worst:.3e} over 5 random directions"))
}

fn identity_order() -> Outcome {
    let m = MaterialParams {
        gamma12: 1.0,
        gamma13: 1.3,
        gamma23: 0.8,
        epsilon: 0.2,
        ..Default::default()
    }
    .validate()
    .map_err(|e| e.to_string())?;
    let mut errs = vec![];
    for n in [32, 64, 128] {
        let grid = Grid::periodic(n, 1.0).map_err(|e| e.to_string())?;
        let c1 = ScalarField::from_fn(&grid, |x, y| 0.3 + 0.2 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
        let c2 = ScalarField::from_fn(&grid, |x, y| 0.4 + 0.1 * (2.0 * PI * (x + y)).cos());
        let c = PhaseTriple::from_two(&grid, c1, c2);
        errs.push(identity_check(&grid, &c, &m));
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    check(
        orders.iter().all(|o| (o - 2.0).abs() <= 0.3),
        format!("residuals {:.3e} {:.3e} {:.3e}, orders {:.3} {:.3}", errs[0], errs[1], errs[2], orders[0], orders[1]),
    )
}

fn interface_1d(dir: &Path) -> Outcome {
    let mut cfg = ScenarioConfig::defaults(Scenario::Interface1d);
    let s = run_in(&mut cfg, dir)?;
    let snap = read_snapshot(&s.final_snapshot).map_err(|e| e.to_string())?;
    let c = snap.phases().map_err(|e| e.to_string())?;
    let eps = cfg.material.epsilon;
    let g = &snap.grid;
    let mut linf: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let exact = tanh_profile(g.x(i) - cfg.init.center_x, eps);
            linf = linf.max((c.c[0].get(i, j) - exact).abs());
        }
    }
    let sigma = interface_energy(&snap).map_err(|e| e.to_string())?;
    let rel = (sigma - cfg.material.gamma12).abs() / cfg.material.gamma12;
    check(
        linf <= 0.02 && rel <= 0.02,
        format!("profile L-inf {linf:.3e}, excess energy {sigma:.5} (relative error {rel:.3e}) at t={}", s.final_time),
    )
}

fn lens(dir: &Path) -> Outcome {
    let mut cfg = ScenarioConfig::defaults(Scenario::Lens);
    cfg.snapshot_every = 100_000;
    let s = run_in(&mut cfg, dir)?;
    let snap = read_snapshot(&s.final_snapshot).map_err(|e| e.to_string())?;
    let a = lens_angles(&snap).map_err(|e| e.to_string())?;
    check(
        a.iter().all(|t| (t - 120.0).abs() <= 5.0),
        format!("angles {:.2} {:.2} {:.2} deg at t={:.3} ({} steps)", a[0], a[1], a[2], s.final_time, s.steps),
    )
}

fn young(dir: &Path) -> Outcome {
    let mut parts = vec![];
    let mut ok = true;
    for target in [0.0, 0.5, -0.5f64] {
        let mut cfg = ScenarioConfig::defaults(Scenario::SessileDrop);
        cfg.material.walls.bottom = WallEnergyModel::young(target.acos(), cfg.material.gamma12);
        cfg.snapshot_every = 100_000;
        let s = run_in(&mut cfg, &dir.join(format!("cos{target}")))?;
        let snap = read_snapshot(&s.final_snapshot).map_err(|e| e.to_string())?;
        let a = contact_angle(&snap).map_err(|e| e.to_string())?;
        let cos = a.theta.cos();
        ok &= (cos - target).abs() <= 0.1;
        parts.push(format!("target {target:+.1} measured {cos:+.4}"));
    }
    check(ok, parts.join(", "))
}

fn well_balanced(dir: &Path) -> Outcome {
    let mut cfg = ScenarioConfig::defaults(Scenario::Interface1d);
    cfg.flow = true;
    cfg.steps = Some(100);
    let s = run_in(&mut cfg, dir)?;
    check(s.max_velocity <= 1e-10, format!("max |v| {:.3e} over {} steps", s.max_velocity, s.steps))
}

fn stokes(dir: &Path) -> Outcome {
    let mut cfg = ScenarioConfig::defaults(Scenario::StokesDecay);
    let s = run_in(&mut cfg, dir)?;
    let (first, last) = (&s.ledger[0], s.ledger.last().ok_or("empty ledger")?);
    let rate = (first.ke_fluid / last.ke_fluid).ln() / (last.time - first.time);
    let m = cfg.material;
    let k = 2.0 * PI / cfg.grid.ly;
    let expected = 2.0 * m.eta * k * k / m.rho;
    let rel = (rate - expected).abs() / expected;
    check(rel <= 0.02, format!("decay rate {rate:.5} vs {expected:.5} (relative error {rel:.3e})"))
}

fn solid_state(cfg: &ScenarioConfig) -> Result<SolidState, String> {
    match build_initial_state(cfg).map_err(|e| e.to_string())? {
        InitialState::Solid(s) => Ok(s),
        InitialState::Fluid(_) => Err("expected a solid scenario".into()),
    }
}

/// `|E(T) - E(0) - W(T)|` for a traction-loaded run with step `dt`.
fn traction_mismatch(cfg: &ScenarioConfig, dt: f64) -> Result<f64, String> {
    let mut s = solid_state(cfg)?;
    let e = |s: &SolidState| solid::solid_energy(s).map(|(k, w)| k + w).map_err(|e| e.to_string());
    let e0 = e(&s)?;
    let steps = (cfg.end_time / dt).round() as usize;
    let mut work = 0.0;
    for _ in 0..steps {
        work += solid::advance_solid(&mut s, dt).map_err(|e| e.to_string())?;
    }
    Ok((e(&s)? - e0 - work).abs())
}

fn piola_check() -> f64 {
    let m = SolidMaterial {
        mu: 1.0,
        lambda: 2.0,
        rho0: 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = Mat2([
            [1.0 + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
            [rng.gen_range(-0.3..0.3), 1.0 + rng.gen_range(-0.3..0.3)],
        ]);
        let p = first_piola(&m, &f).expect("admissible");
        let h = 1e-6;
        for a in 0..2 {
            for b in 0..2 {
                let (mut fp, mut fm) = (f, f);
                fp.0[a][b] += h;
                fm.0[a][b] -= h;
                let fd = (strain_energy_density(&m, &fp).unwrap() - strain_energy_density(&m, &fm).unwrap()) / (2.0 * h);
                worst = worst.max((fd - p.0[a][b]).abs() / p.norm());
            }
        }
    }
    worst
}

fn solid_identity(dir: &Path) -> Outcome {
    let traction = ScenarioConfig::defaults(Scenario::SolidTraction);
    let dt0 = 0.5 * solid_state(&traction)?.stable_dt();
    let errs = [dt0, dt0 / 2.0, dt0 / 4.0]
        .iter()
        .map(|&dt| traction_mismatch(&traction, dt))
        .collect::<Result<Vec<_>, _>>()?;
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order_ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.3);

    let mut vib = ScenarioConfig::defaults(Scenario::SolidVibration);
    let period = 4.0 * vib.solid.lx / vib.solid.material.wave_speed();
    vib.end_time = 10.0 * period;
    vib.snapshot_every = 100_000;
    let s = run_in(&mut vib, dir)?;
    let e0 = s.ledger[0].total();
    let drift = s.ledger.iter().map(|r| (r.total() - e0).abs() / e0).fold(0.0, f64::max);

    let piola = piola_check();
    check(
        order_ok && drift <= 0.01 && piola <= 1e-6,
        format!(
            "work mismatch {:.3e} {:.3e} {:.3e} (orders {:.3} {:.3}), vibration drift {drift:.3e} over 10 periods, P vs dW/dF {piola:.3e}",
            errs[0], errs[1], errs[2], orders[0], orders[1]
        ),
    )
}

fn binary_reduction(dir: &Path) -> Outcome {
    let mut cfg = ScenarioConfig::defaults(Scenario::Spinodal);
    cfg.init.binary = true;
    cfg.steps = Some(500);
    cfg.snapshot_every = 500;
    let s = run_in(&mut cfg, dir)?;
    check(s.max_c3 <= 1e-8, format!("max |c3| {:.3e} over {} steps", s.max_c3, s.steps))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let root = tmp.path();
    // shared by the first two criteria; runs inside the first one's timer
    let spinodal = OnceCell::new();
    let spinodal = || spinodal.get_or_init(|| spinodal_runs(&root.join("spinodal"))).as_ref();
    let criteria: Vec<Criterion> = vec![
        ("energy dissipation law", Box::new(|| energy_law(spinodal().map_err(String::clone)?))),
        ("sum constraint and mass", Box::new(|| sum_and_mass(spinodal().map_err(String::clone)?))),
        ("variational derivative", Box::new(variational_gradient)),
        ("stress identity order", Box::new(identity_order)),
        ("1d interface", Box::new(|| interface_1d(&root.join("interface1d")))),
        ("neumann triangle", Box::new(|| lens(&root.join("lens")))),
        ("young's law", Box::new(|| young(&root.join("sessile")))),
        ("well-balancedness", Box::new(|| well_balanced(&root.join("balanced")))),
        ("stokes decay", Box::new(|| stokes(&root.join("stokes")))),
        ("solid energy identity", Box::new(|| solid_identity(&root.join("solid")))),
        ("binary reduction", Box::new(|| binary_reduction(&root.join("binary")))),
    ];
    // numeric arguments select criteria; anything else is ignored
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(n + 1)) {
            continue;
        }
        let t = Instant::now();
        let outcome = f().map_err(|e| e.replace('\n', " "));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", n + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
