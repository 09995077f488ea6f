//! Energy bookkeeping. Observer only: nothing here feeds back into a solver.

use std::io::Write;

use crate::energy::{self, PhaseTriple};
use crate::error::{Error, Result};
use crate::grid::{self, Boundary, FaceField, Grid};
use crate::material::Material;
use crate::stepper::{FluidState, VelocityView};
use crate::wetting;

pub const CSV_COLUMNS: [&str; 11] = [
    "t",
    "ke_fluid",
    "free_energy",
    "wall_energy",
    "ke_solid",
    "strain_solid",
    "total",
    "d_chem",
    "d_visc",
    "residual",
    "residual_rel",
];

/// Energy components and dissipation rates at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLedger {
    pub time: f64,
    pub ke_fluid: f64,
    pub free_energy: f64,
    pub wall_energy: f64,
    pub ke_solid: f64,
    pub strain_solid: f64,
    pub d_chem: f64,
    pub d_visc: f64,
    /// Balance residual against the previous sample; zero for the first.
    pub residual: f64,
    pub residual_rel: f64,
}

impl EnergyLedger {
    pub fn total(&self) -> f64 {
        self.ke_fluid + self.free_energy + self.wall_energy + self.ke_solid + self.strain_solid
    }

    pub fn dissipation(&self) -> f64 {
        self.d_chem + self.d_visc
    }

    pub fn solid(time: f64, kinetic: f64, strain: f64) -> Self {
        EnergyLedger {
            time,
            ke_solid: kinetic,
            strain_solid: strain,
            ..Default::default()
        }
    }

    fn values(&self) -> [f64; 11] {
        [
            self.time,
            self.ke_fluid,
            self.free_energy,
            self.wall_energy,
            self.ke_solid,
            self.strain_solid,
            self.total(),
            self.d_chem,
            self.d_visc,
            self.residual,
            self.residual_rel,
        ]
    }
}

/// All energy terms of a fluid state. `state.c` must have synchronised ghosts.
pub fn ledger(state: &FluidState) -> EnergyLedger {
    let grid = &state.grid;
    let m = &state.material;
    EnergyLedger {
        time: state.time,
        ke_fluid: kinetic_energy(grid, m, &state.v),
        free_energy: energy::free_energy(grid, &state.c, m),
        wall_energy: wetting::wall_energy_integral(grid, &state.c, m),
        d_chem: chemical_dissipation(grid, &state.c, m),
        d_visc: viscous_dissipation(grid, m, &state.v),
        ..Default::default()
    }
}

pub fn kinetic_energy(grid: &Grid, material: &Material, v: &FaceField) -> f64 {
    0.5 * material.rho() * grid::integrate_faces(grid, v, v)
}

/// `sum_i (M/sigma_i) int |grad mu_i|^2` with the chemical potentials of `c`.
pub fn chemical_dissipation(grid: &Grid, c: &PhaseTriple, material: &Material) -> f64 {
    let mu = energy::chemical_potentials(grid, c, material);
    let s = material.sigma();
    (0..3)
        .map(|p| {
            let g = grid::gradient(grid, &mu.mu[p]);
            material.mobility() / s[p] * grid::integrate_faces(grid, &g, &g)
        })
        .sum()
}

/// `2 eta int sym(grad v) : sym(grad v)`. Normal strains live at cell
/// centres, the shear strain at cell corners; corners on a wall carry half
/// weight per wall.
pub fn viscous_dissipation(grid: &Grid, material: &Material, v: &FaceField) -> f64 {
    let eta = material.eta();
    if eta == 0.0 {
        return 0.0;
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let mut normal = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let ux = (v.u(i + 1, j) - v.u(i, j)) / grid.hx;
            let vy = (v.v(i, j + 1) - v.v(i, j)) / grid.hy;
            normal += ux * ux + vy * vy;
        }
    }
    let view = VelocityView { grid, v };
    let corners = |b: Boundary, n: usize| match b {
        Boundary::Periodic => 0..n,
        Boundary::Wall => 0..n + 1,
    };
    let weight = |b: Boundary, k: usize, n: usize| match b {
        Boundary::Wall if k == 0 || k == n => 0.5,
        _ => 1.0,
    };
    let mut shear = 0.0;
    for j in corners(grid.y_boundary, ny) {
        let wy = weight(grid.y_boundary, j, ny);
        for i in corners(grid.x_boundary, nx) {
            let w = wy * weight(grid.x_boundary, i, nx);
            let (ii, jj) = (i as isize, j as isize);
            let uy = (view.u(ii, jj) - view.u(ii, jj - 1)) / grid.hy;
            let vx = (view.v(ii, jj) - view.v(ii - 1, jj)) / grid.hx;
            shear += 0.5 * w * (uy + vx) * (uy + vx);
        }
    }
    2.0 * eta * (normal + shear) * grid.cell_area()
}

/// `r = (E1 - E0)/dt + (D0 + D1)/2`; returns `(r, r/|E1|)`.
pub fn balance_residual(prev: &EnergyLedger, next: &EnergyLedger, dt: f64) -> (f64, f64) {
    let r = (next.total() - prev.total()) / dt + 0.5 * (prev.dissipation() + next.dissipation());
    (r, relative(r, next.total()))
}

/// Solid counterpart: `r = (E1 - E0 - W)/dt` with `W` the external work over
/// the step.
pub fn solid_balance_residual(prev: &EnergyLedger, next: &EnergyLedger, dt: f64, work: f64) -> (f64, f64) {
    let r = (next.total() - prev.total() - work) / dt;
    (r, relative(r, next.total()))
}

fn relative(r: f64, e: f64) -> f64 {
    if e == 0.0 {
        if r == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        r / e.abs()
    }
}

/// L-infinity norm over interior cells of
/// `div(sum_i (3/4) eps sigma_i grad c_i (x) grad c_i) - grad Psi + sum_i mu_i grad c_i`
/// built from centred differences. Cells within two of a wall are skipped.
pub fn identity_check(grid: &Grid, c: &PhaseTriple, material: &Material) -> f64 {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let eps = material.epsilon();
    let s = material.sigma();
    let kappa = 0.75 * eps;
    let px = grid.x_boundary == Boundary::Periodic;
    let py = grid.y_boundary == Boundary::Periodic;
    let wrap = |i: isize, j: isize| -> (usize, usize) {
        let i = if px { i.rem_euclid(nx) } else { i };
        let j = if py { j.rem_euclid(ny) } else { j };
        (i as usize, j as usize)
    };
    let val = |p: usize, i: isize, j: isize| {
        let (i, j) = wrap(i, j);
        c.c[p].get(i, j)
    };
    let grad = |p: usize, i: isize, j: isize| {
        (
            (val(p, i + 1, j) - val(p, i - 1, j)) / (2.0 * grid.hx),
            (val(p, i, j + 1) - val(p, i, j - 1)) / (2.0 * grid.hy),
        )
    };
    // stress components (xx, xy, yy) and free-energy density at a cell
    let stress = |i: isize, j: isize| {
        let mut t = (0.0, 0.0, 0.0);
        for p in 0..3 {
            let (gx, gy) = grad(p, i, j);
            let k = kappa * s[p];
            t.0 += k * gx * gx;
            t.1 += k * gx * gy;
            t.2 += k * gy * gy;
        }
        t
    };
    let psi = |i: isize, j: isize| {
        let mut e = 0.0;
        for p in 0..3 {
            let cv = val(p, i, j);
            let q = cv * (1.0 - cv);
            let (gx, gy) = grad(p, i, j);
            e += 12.0 / eps * 0.5 * s[p] * q * q + 0.5 * kappa * s[p] * (gx * gx + gy * gy);
        }
        e
    };
    let lap = |p: usize, i: isize, j: isize| {
        let cv = val(p, i, j);
        (val(p, i + 1, j) - 2.0 * cv + val(p, i - 1, j)) / (grid.hx * grid.hx)
            + (val(p, i, j + 1) - 2.0 * cv + val(p, i, j - 1)) / (grid.hy * grid.hy)
    };
    let range = |n: isize, periodic: bool| if periodic { 0..n } else { 2..n - 2 };
    let mut worst: f64 = 0.0;
    for j in range(ny, py) {
        for i in range(nx, px) {
            let (e, w) = (stress(i + 1, j), stress(i - 1, j));
            let (n, so) = (stress(i, j + 1), stress(i, j - 1));
            let div_x = (e.0 - w.0) / (2.0 * grid.hx) + (n.1 - so.1) / (2.0 * grid.hy);
            let div_y = (e.1 - w.1) / (2.0 * grid.hx) + (n.2 - so.2) / (2.0 * grid.hy);
            let gpx = (psi(i + 1, j) - psi(i - 1, j)) / (2.0 * grid.hx);
            let gpy = (psi(i, j + 1) - psi(i, j - 1)) / (2.0 * grid.hy);
            // the multiplier drops out: sum_i grad c_i = 0
            let (mut fx, mut fy) = (0.0, 0.0);
            for p in 0..3 {
                let cv = val(p, i, j);
                let mu = 12.0 / eps * energy::bulk_derivative(cv, s[p]) - kappa * s[p] * lap(p, i, j);
                let (gx, gy) = grad(p, i, j);
                fx += mu * gx;
                fy += mu * gy;
            }
            worst = worst.max((div_x - gpx + fx).abs()).max((div_y - gpy + fy).abs());
        }
    }
    worst
}

/// Streams ledger rows as CSV.
pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        Ok(CsvWriter { out })
    }

    pub fn push(&mut self, row: &EnergyLedger) -> Result<()> {
        let line: Vec<String> = row.values().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[EnergyLedger]) -> Result<W> {
    let mut w = CsvWriter::new(out)?;
    for r in rows {
        w.push(r)?;
    }
    w.flush()?;
    Ok(w.into_inner())
}

/// Parses CSV written by [`CsvWriter`]. The `total` column is checked
/// against the sum of components only through the caller.
pub fn parse_csv(text: &str) -> Result<Vec<EnergyLedger>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_COLUMNS.join(",") => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "missing or unexpected energy.csv header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        if vals.len() != CSV_COLUMNS.len() {
            return Err(Error::Parse {
                line: n + 1,
                message: format!("expected {} columns, found {}", CSV_COLUMNS.len(), vals.len()),
            });
        }
        rows.push(EnergyLedger {
            time: vals[0],
            ke_fluid: vals[1],
            free_energy: vals[2],
            wall_energy: vals[3],
            ke_solid: vals[4],
            strain_solid: vals[5],
            d_chem: vals[7],
            d_visc: vals[8],
            residual: vals[9],
            residual_rel: vals[10],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FlatLaplacian, ScalarField};
    use crate::material::MaterialParams;
    use crate::stepper::{pressure_project, StepperOptions};
    use crate::wetting::{WallEnergyModel, WallSides};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn material() -> Material {
        MaterialParams::default().validate().unwrap()
    }

    fn random_solenoidal(grid: &Grid, seed: u64) -> FaceField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = FaceField::zeros(grid);
        v.u.iter_mut().chain(v.v.iter_mut()).for_each(|x| *x = rng.gen_range(-1.0..1.0));
        v.enforce_boundaries(grid);
        let opts = StepperOptions {
            solve_tol: 1e-14,
            max_iter_factor: 200,
            ..Default::default()
        };
        pressure_project(grid, &material(), &v, 1.0, &opts).unwrap().0
    }

    #[test]
    fn quiescent_single_phase_with_wall_energy() {
        let grid = Grid::new(10, 8, 2.0, 1.0, Boundary::Periodic, Boundary::Wall).unwrap();
        let params = MaterialParams {
            walls: WallSides::uniform(WallEnergyModel::new([0.3; 3])),
            ..Default::default()
        };
        let m = params.validate().unwrap();
        let c = PhaseTriple::uniform(&grid, [1.0, 0.0, 0.0]);
        let s = FluidState::new(grid, m, c, FaceField::zeros(&grid));
        let l = ledger(&s);
        assert_eq!(l.ke_fluid, 0.0);
        assert_eq!(l.free_energy, 0.0);
        assert_eq!(l.d_chem, 0.0);
        assert_eq!(l.d_visc, 0.0);
        // bottom and top walls, length 2 each
        assert!((l.wall_energy - 0.3 * 4.0).abs() < 1e-14);
    }

    #[test]
    fn rigid_translation() {
        let grid = Grid::periodic(8, 1.0).unwrap();
        let c = PhaseTriple::uniform(&grid, [0.0, 1.0, 0.0]);
        let v = FaceField::from_fn(&grid, |_, _| 0.5, |_, _| 0.0);
        let s = FluidState::new(grid, material(), c, v);
        let l = ledger(&s);
        assert!((l.ke_fluid - 0.5 * 0.25).abs() < 1e-14);
        assert_eq!(l.free_energy, 0.0);
        assert_eq!(l.d_visc, 0.0);
    }

    #[test]
    fn fixed_point_has_zero_residual() {
        let l = EnergyLedger {
            free_energy: 1.0,
            ..Default::default()
        };
        assert_eq!(balance_residual(&l, &l, 0.1), (0.0, 0.0));
    }

    #[test]
    fn viscous_dissipation_matches_laplacian_work() {
        for (xb, yb) in [
            (Boundary::Periodic, Boundary::Periodic),
            (Boundary::Periodic, Boundary::Wall),
            (Boundary::Wall, Boundary::Wall),
        ] {
            let grid = Grid::new(12, 10, 1.2, 1.0, xb, yb).unwrap();
            let m = material();
            let v = random_solenoidal(&grid, 5);
            let d = viscous_dissipation(&grid, &m, &v);
            // -eta (v, lap v) using the same component operators as the stepper
            let mut work = 0.0;
            let mode = |b, normal: bool| match (b, normal) {
                (Boundary::Periodic, _) => grid::AxisBc::Periodic,
                (Boundary::Wall, true) => grid::AxisBc::DirichletNode,
                (Boundary::Wall, false) => grid::AxisBc::DirichletMirror,
            };
            let off = |b| if b == Boundary::Wall { 1 } else { 0 };
            let mx = if xb == Boundary::Wall { grid.nx - 1 } else { grid.nx };
            let lu = FlatLaplacian {
                mx,
                my: grid.ny,
                hx: grid.hx,
                hy: grid.hy,
                bx: mode(xb, true),
                by: mode(yb, false),
            };
            let xu: Vec<f64> = (0..grid.ny).flat_map(|j| (0..mx).map(move |i| (i, j))).map(|(i, j)| v.u(i + off(xb), j)).collect();
            let mut o = vec![0.0; xu.len()];
            lu.apply(&xu, &mut o);
            work += xu.iter().zip(&o).map(|(a, b)| a * b).sum::<f64>();
            let my = if yb == Boundary::Wall { grid.ny - 1 } else { grid.ny };
            let lv = FlatLaplacian {
                mx: grid.nx,
                my,
                hx: grid.hx,
                hy: grid.hy,
                bx: mode(xb, false),
                by: mode(yb, true),
            };
            let xv: Vec<f64> = (0..my).flat_map(|j| (0..grid.nx).map(move |i| (i, j))).map(|(i, j)| v.v(i, j + off(yb))).collect();
            let mut o = vec![0.0; xv.len()];
            lv.apply(&xv, &mut o);
            work += xv.iter().zip(&o).map(|(a, b)| a * b).sum::<f64>();
            let expected = -m.eta() * work * grid.cell_area();
            assert!((d - expected).abs() < 1e-9 * expected, "{xb:?} {yb:?}: {d} vs {expected}");
        }
    }

    #[test]
    fn identity_vanishes_for_uniform_phases() {
        let grid = Grid::periodic(8, 1.0).unwrap();
        let c = PhaseTriple::uniform(&grid, [0.2, 0.3, 0.5]);
        assert_eq!(identity_check(&grid, &c, &material()), 0.0);
    }

    #[test]
    fn identity_converges_at_second_order() {
        let m = MaterialParams {
            gamma12: 1.0,
            gamma13: 1.3,
            gamma23: 0.8,
            epsilon: 0.2,
            ..Default::default()
        }
        .validate()
        .unwrap();
        let mut errs = vec![];
        for n in [32, 64] {
            let grid = Grid::periodic(n, 1.0).unwrap();
            let c1 = ScalarField::from_fn(&grid, |x, y| 0.3 + 0.2 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
            let c2 = ScalarField::from_fn(&grid, |x, y| 0.4 + 0.1 * (2.0 * PI * (x + y)).cos());
            let c = PhaseTriple::from_two(&grid, c1, c2);
            errs.push(identity_check(&grid, &c, &m));
        }
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "{errs:?}");
    }

    #[test]
    fn csv_shape() {
        let empty = write_csv(Vec::new(), &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
        let rows = [EnergyLedger::default(); 3];
        let out = write_csv(Vec::new(), &rows).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 4);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(vals in proptest::collection::vec(-1e12f64..1e12, 10)) {
            let row = EnergyLedger {
                time: vals[0],
                ke_fluid: vals[1],
                free_energy: vals[2],
                wall_energy: vals[3],
                ke_solid: vals[4],
                strain_solid: vals[5],
                d_chem: vals[6].abs(),
                d_visc: vals[7].abs(),
                residual: vals[8],
                residual_rel: vals[9] * 1e-20,
            };
            let text = String::from_utf8(write_csv(Vec::new(), &[row]).unwrap()).unwrap();
            let back = parse_csv(&text).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(back[0], row);
        }

        #[test]
        fn dissipation_is_nonnegative(seed in 0u64..1000) {
            let grid = Grid::new(8, 8, 1.0, 1.0, Boundary::Periodic, Boundary::Wall).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = FaceField::zeros(&grid);
            v.u.iter_mut().chain(v.v.iter_mut()).for_each(|x| *x = rng.gen_range(-1.0..1.0));
            v.enforce_boundaries(&grid);
            let c1 = ScalarField::from_fn(&grid, |_, _| rng.gen_range(0.0..0.5));
            let c2 = ScalarField::from_fn(&grid, |_, _| rng.gen_range(0.0..0.5));
            let s = FluidState::new(grid, material(), PhaseTriple::from_two(&grid, c1, c2), v);
            let l = ledger(&s);
            prop_assert!(l.d_chem >= 0.0);
            prop_assert!(l.d_visc >= 0.0);
        }
    }
}
