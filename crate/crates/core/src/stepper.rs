//! One time step of the coupled ternary Navier-Stokes-Cahn-Hilliard system.
//!
//! Order within a step: phase transport and diffusion (semi-implicit,
//! linearly stabilised), momentum with explicit advection, implicit
//! viscosity and the capillary force, then pressure projection.
//!
//! The phase update decouples into three solves with one shared operator.
//! With `K = S I - (3/4) eps lap + s_w B` (B: wall-cell indicator over the
//! normal spacing), each phase obeys
//!
//! ```text
//! c_i - dt M lap(K c_i) = r_i + dt (M / sigma_i) lap(a_i + beta)
//! mu_i = sigma_i K c_i + a_i + beta
//! ```
//!
//! where `r_i` is the advected field and `a_i` collects the explicit bulk
//! and wall terms. Summing the phase equations fixes `sum c_i`, which in turn
//! gives `beta` in closed form before any solve.

use std::rc::Rc;

use crate::energy::{self, ChemPotTriple, PhaseTriple};
use crate::error::{Error, Result};
use crate::grid::{self, AxisBc, Boundary, BoundaryRule, FaceField, FlatLaplacian, Grid, ScalarField};
use crate::linsolve::{self, CgOptions};
use crate::spectral::{LineSolver, SpectralLaplacian};
use crate::material::Material;
use crate::wetting;

/// Constants of the capillary time-step restriction
/// `dt <= (c2 tau_eta + sqrt((c2 tau_eta)^2 + 4 c1 tau_rho^2)) / 2`
/// with `tau_eta = eta h / gamma` and `tau_rho^2 = rho h^3 / gamma`.
const CAPILLARY_C1: f64 = 0.01;
const CAPILLARY_C2: f64 = 2.0;
const ADVECTIVE_CFL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperOptions {
    /// Solve momentum and projection. When false the velocity is frozen.
    pub flow: bool,
    /// Evolve the phase fields.
    pub phase: bool,
    /// Relative residual for the phase-field solve.
    pub phase_tol: f64,
    /// Relative residual for the viscous and pressure solves.
    pub solve_tol: f64,
    /// Iteration cap is `max_iter_factor * (nx + ny)`.
    pub max_iter_factor: usize,
}

impl Default for StepperOptions {
    fn default() -> Self {
        StepperOptions {
            flow: true,
            phase: true,
            phase_tol: 1e-12,
            solve_tol: 1e-12,
            max_iter_factor: 10,
        }
    }
}

impl StepperOptions {
    fn cg(&self, grid: &Grid, tol: f64, singular: bool) -> CgOptions {
        CgOptions {
            tol,
            max_iter: self.max_iter_factor * (grid.nx + grid.ny),
            singular,
        }
    }
}

/// Eulerian unknowns at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub time: f64,
    pub c: PhaseTriple,
    pub v: FaceField,
    pub p: ScalarField,
    pub grid: Grid,
    pub material: Material,
}

impl FluidState {
    pub fn new(grid: Grid, material: Material, mut c: PhaseTriple, mut v: FaceField) -> Self {
        c.sync(&grid, &material);
        v.enforce_boundaries(&grid);
        FluidState {
            time: 0.0,
            c,
            v,
            p: ScalarField::zeros(&grid),
            grid,
            material,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityLimits {
    pub advective: f64,
    pub capillary: f64,
}

impl StabilityLimits {
    pub fn strictest(&self) -> f64 {
        self.advective.min(self.capillary)
    }
}

pub fn stability_limits(state: &FluidState, opts: &StepperOptions) -> StabilityLimits {
    let h = state.grid.h_min();
    let vmax = state.v.max_abs();
    let advective = if vmax > 0.0 { ADVECTIVE_CFL * h / vmax } else { f64::INFINITY };
    let capillary = if opts.flow && opts.phase {
        let m = &state.material;
        let gamma = m.max_gamma();
        let tau_eta = CAPILLARY_C2 * m.eta() * h / gamma;
        let tau_rho_sq = m.rho() * h * h * h / gamma;
        0.5 * (tau_eta + (tau_eta * tau_eta + 4.0 * CAPILLARY_C1 * tau_rho_sq).sqrt())
    } else {
        f64::INFINITY
    };
    StabilityLimits { advective, capillary }
}

pub fn check_time_step(state: &FluidState, dt: f64, opts: &StepperOptions) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    let lim = stability_limits(state, opts);
    if dt > lim.advective {
        return Err(Error::CflViolation {
            dt,
            limit: lim.advective,
            bound: "advective",
        });
    }
    if dt > lim.capillary {
        return Err(Error::CflViolation {
            dt,
            limit: lim.capillary,
            bound: "capillary",
        });
    }
    Ok(())
}

/// Shift of the linear stabilisation per unit spreading coefficient.
pub fn bulk_stabilisation(material: &Material) -> f64 {
    2.0 * 12.0 / material.epsilon()
}

/// Wall stabilisation per unit spreading coefficient.
pub fn wall_stabilisation(grid: &Grid, material: &Material) -> f64 {
    let sigma = material.sigma();
    grid.wall_sides()
        .map(|s| 6.0 * material.walls().side(s).stiffness(sigma))
        .fold(0.0, f64::max)
}

/// `sum over wall faces of 1/h_n` per cell, flattened.
fn wall_indicator(grid: &Grid) -> Vec<f64> {
    let mut b = vec![0.0; grid.cells()];
    for side in grid.wall_sides() {
        let hn = grid.normal_spacing(side);
        for k in 0..grid.side_len(side) {
            let (i, j) = grid.side_cell(side, k);
            b[j * grid.nx + i] += 1.0 / hn;
        }
    }
    b
}

struct PhaseOperator {
    lap: FlatLaplacian,
    shift: f64,
    wall_shift: f64,
    wall: Vec<f64>,
    kappa: f64,
}

impl PhaseOperator {
    fn new(grid: &Grid, material: &Material) -> Self {
        PhaseOperator {
            lap: FlatLaplacian::cells(grid),
            shift: bulk_stabilisation(material),
            wall_shift: wall_stabilisation(grid, material),
            wall: wall_indicator(grid),
            kappa: 0.75 * material.epsilon(),
        }
    }

    /// `K x = S x - (3/4) eps lap x + s_w B x`
    fn apply_k(&self, x: &[f64], out: &mut [f64]) {
        self.lap.apply(x, out);
        for k in 0..x.len() {
            out[k] = self.shift * x[k] - self.kappa * out[k] + self.wall_shift * self.wall[k] * x[k];
        }
    }
}

/// Exact preconditioner for walls normal to one axis only, keeping the wall
/// stabilisation of that axis.
fn wall_line_solver(grid: &Grid, op: &PhaseOperator, c: f64) -> Option<Rc<LineSolver>> {
    let along_y = grid.y_boundary == Boundary::Wall;
    let (n, h) = if along_y { (grid.ny, grid.hy) } else { (grid.nx, grid.hx) };
    let mut w = vec![0.0; n];
    w[0] += op.wall_shift / h;
    w[n - 1] += op.wall_shift / h;
    LineSolver::cached(&op.lap, op.shift, op.kappa, c, &w, along_y)
}

fn lap_flat(lap: &FlatLaplacian, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    lap.apply(x, &mut out);
    out
}

/// Advected field `c - dt div(v avg(c))`. Requires ghosts on `c`.
fn advect(grid: &Grid, c: &ScalarField, v: &FaceField, dt: f64) -> Vec<f64> {
    let mut flux = grid::face_average(grid, c);
    for (f, u) in flux.u.iter_mut().zip(&v.u) {
        *f *= u;
    }
    for (f, w) in flux.v.iter_mut().zip(&v.v) {
        *f *= w;
    }
    flux.enforce_boundaries(grid);
    let div = grid::divergence(grid, &flux);
    c.interior_iter().zip(div.interior_iter()).map(|(ci, d)| ci - dt * d).collect()
}

/// Semi-implicit phase update. `state.c` must have synchronised ghosts.
/// Returns the new phases (ghosts synchronised) and the chemical potentials
/// used for the update, which also drive the capillary force.
pub fn phase_step(state: &FluidState, dt: f64, opts: &StepperOptions) -> Result<(PhaseTriple, ChemPotTriple)> {
    let grid = &state.grid;
    let m = &state.material;
    let sigma = m.sigma();
    let eps = m.epsilon();
    let mob = m.mobility();
    let n = grid.cells();
    let op = PhaseOperator::new(grid, m);

    let mut r: [Vec<f64>; 3] = std::array::from_fn(|p| advect(grid, &state.c.c[p], &state.v, dt));
    // Explicit centred transport amplifies any sum defect, and nothing else
    // damps it. Remove its mean-free part in equal shares (phase masses are
    // unchanged).
    let defect: Vec<f64> = (0..n).map(|k| r[0][k] + r[1][k] + r[2][k] - 1.0).collect();
    let mean_defect = defect.iter().sum::<f64>() / n as f64;
    for p in 0..3 {
        for k in 0..n {
            r[p][k] -= (defect[k] - mean_defect) / 3.0;
        }
    }
    let cn: [Vec<f64>; 3] = std::array::from_fn(|p| state.c.c[p].interior());

    // explicit part a_i
    let mut a: [Vec<f64>; 3] = std::array::from_fn(|p| {
        let s = sigma[p];
        cn[p].iter().map(|&c| 12.0 / eps * energy::bulk_derivative(c, s) - op.shift * s * c).collect()
    });
    for side in grid.wall_sides() {
        let model = m.walls().side(side);
        let hn = grid.normal_spacing(side);
        for k in 0..grid.side_len(side) {
            let (i, j) = grid.side_cell(side, k);
            let idx = j * grid.nx + i;
            for p in 0..3 {
                let c = cn[p][idx];
                a[p][idx] += (model.energy_derivative(p, c) - sigma[p] * op.wall_shift * c) / hn;
            }
        }
    }

    let inv_sum = m.inverse_sigma_sum();
    let closure_beta = |sum_c: &[f64]| -> Vec<f64> {
        let mut k_sum = vec![0.0; n];
        op.apply_k(sum_c, &mut k_sum);
        (0..n)
            .map(|k| {
                let w: f64 = (0..3).map(|p| a[p][k] / sigma[p]).sum();
                -(k_sum[k] + w) / inv_sum
            })
            .collect()
    };

    let sum_r: Vec<f64> = (0..n).map(|k| r[0][k] + r[1][k] + r[2][k]).collect();
    let beta_pred = closure_beta(&sum_r);

    let apply_a = |x: &[f64], out: &mut [f64]| {
        let mut kx = vec![0.0; x.len()];
        op.apply_k(x, &mut kx);
        op.lap.apply(&kx, out);
        for k in 0..x.len() {
            out[k] = x[k] - dt * mob * out[k];
        }
    };
    // A is self-adjoint in the K inner product, so solve the symmetric
    // system K A x = K rhs, preconditioned by its wall-free part.
    let apply_ka = |x: &[f64], out: &mut [f64]| {
        let mut ax = vec![0.0; x.len()];
        apply_a(x, &mut ax);
        op.apply_k(&ax, out);
    };
    let eig = SpectralLaplacian::new(&op.lap);
    let lines = (op.wall_shift > 0.0).then(|| wall_line_solver(grid, &op, dt * mob)).flatten();
    let precond = |v: &[f64], o: &mut [f64]| match &lines {
        Some(l) => l.apply(v, o),
        None => eig.apply_fn(
            |l| {
                let k = op.shift - op.kappa * l;
                1.0 / (k * (1.0 - dt * mob * l * k))
            },
            v,
            o,
        ),
    };
    let cg_opts = opts.cg(grid, opts.phase_tol, false);

    let mut solved: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for p in 0..3 {
        let src: Vec<f64> = (0..n).map(|k| a[p][k] + beta_pred[k]).collect();
        let lap_src = lap_flat(&op.lap, &src);
        let rhs: Vec<f64> = (0..n).map(|k| r[p][k] + dt * mob / sigma[p] * lap_src[k]).collect();
        let mut k_rhs = vec![0.0; n];
        op.apply_k(&rhs, &mut k_rhs);
        let mut x = cn[p].clone();
        let report = linsolve::conjugate_gradient(apply_ka, Some(precond), &k_rhs, &mut x, cg_opts);
        if !report.converged {
            return Err(Error::LinearSolveFailure {
                what: "phase-field solve",
                iterations: report.iterations,
                residual: report.relative_residual,
            });
        }
        solved[p] = x;
    }

    // Close beta on the solved fields so sum_i mu_i / sigma_i = 0 exactly,
    // then update in flux form so each phase mass is conserved exactly.
    let sum_solved: Vec<f64> = (0..n).map(|k| solved[0][k] + solved[1][k] + solved[2][k]).collect();
    let beta = closure_beta(&sum_solved);

    let mut mu_flat: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for p in 0..3 {
        let mut kc = vec![0.0; n];
        op.apply_k(&solved[p], &mut kc);
        mu_flat[p] = (0..n).map(|k| sigma[p] * kc[k] + a[p][k] + beta[k]).collect();
    }
    let new_c: [ScalarField; 3] = std::array::from_fn(|p| {
        let lap_mu = lap_flat(&op.lap, &mu_flat[p]);
        let vals: Vec<f64> = (0..n).map(|k| r[p][k] + dt * mob / sigma[p] * lap_mu[k]).collect();
        ScalarField::from_interior(grid, &vals)
    });
    let mut c = PhaseTriple { c: new_c };
    c.sync(grid, m);
    let mut mu = ChemPotTriple {
        mu: std::array::from_fn(|p| ScalarField::from_interior(grid, &mu_flat[p])),
        beta: ScalarField::from_interior(grid, &beta),
    };
    mu.sync(grid);
    Ok((c, mu))
}

/// Velocity access with ghost values outside the stored range.
pub(crate) struct VelocityView<'a> {
    pub(crate) grid: &'a Grid,
    pub(crate) v: &'a FaceField,
}

impl VelocityView<'_> {
    /// x component at face `i` in `0..=nx`, row `j` in `-1..=ny`.
    pub(crate) fn u(&self, i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.grid.nx as isize, self.grid.ny as isize);
        let i = match self.grid.x_boundary {
            Boundary::Periodic => i.rem_euclid(nx),
            Boundary::Wall => i,
        };
        if (0..ny).contains(&j) {
            return self.v.u(i as usize, j as usize);
        }
        match self.grid.y_boundary {
            Boundary::Periodic => self.v.u(i as usize, j.rem_euclid(ny) as usize),
            Boundary::Wall => {
                let mirror = if j < 0 { 0 } else { ny - 1 };
                -self.v.u(i as usize, mirror as usize)
            }
        }
    }

    /// y component at column `i` in `-1..=nx`, face `j` in `0..=ny`.
    pub(crate) fn v(&self, i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.grid.nx as isize, self.grid.ny as isize);
        let j = match self.grid.y_boundary {
            Boundary::Periodic => j.rem_euclid(ny),
            Boundary::Wall => j,
        };
        if (0..nx).contains(&i) {
            return self.v.v(i as usize, j as usize);
        }
        match self.grid.x_boundary {
            Boundary::Periodic => self.v.v(i.rem_euclid(nx) as usize, j as usize),
            Boundary::Wall => {
                let mirror = if i < 0 { 0 } else { nx - 1 };
                -self.v.v(mirror as usize, j as usize)
            }
        }
    }
}

/// Divergence-form centred advection `div(v v)` on the staggered grid.
/// Kinetic-energy neutral for discretely divergence-free velocities.
pub fn advection(grid: &Grid, v: &FaceField) -> FaceField {
    let (nx, ny) = (grid.nx, grid.ny);
    let view = VelocityView { grid, v };
    // uu and vv at cell centres, uv at corners
    let mut uu = vec![0.0; nx * ny];
    let mut vv = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let ub = 0.5 * (v.u(i, j) + v.u(i + 1, j));
            let vb = 0.5 * (v.v(i, j) + v.v(i, j + 1));
            uu[j * nx + i] = ub * ub;
            vv[j * nx + i] = vb * vb;
        }
    }
    let mut uv = vec![0.0; (nx + 1) * (ny + 1)];
    for j in 0..=ny as isize {
        for i in 0..=nx as isize {
            let ub = 0.5 * (view.u(i, j - 1) + view.u(i, j));
            let vb = 0.5 * (view.v(i - 1, j) + view.v(i, j));
            uv[j as usize * (nx + 1) + i as usize] = ub * vb;
        }
    }
    let cell = |a: &[f64], i: isize, j: usize| a[j * nx + i.rem_euclid(nx as isize) as usize];
    let cell_y = |a: &[f64], i: usize, j: isize| a[j.rem_euclid(ny as isize) as usize * nx + i];
    let mut out = FaceField::zeros(grid);
    for j in 0..ny {
        for i in grid.x_faces() {
            let ii = i as isize;
            let val = (cell(&uu, ii, j) - cell(&uu, ii - 1, j)) / grid.hx
                + (uv[(j + 1) * (nx + 1) + i] - uv[j * (nx + 1) + i]) / grid.hy;
            out.set_u(i, j, val);
        }
    }
    for j in grid.y_faces() {
        for i in 0..nx {
            let jj = j as isize;
            let val = (uv[j * (nx + 1) + i + 1] - uv[j * (nx + 1) + i]) / grid.hx
                + (cell_y(&vv, i, jj) - cell_y(&vv, i, jj - 1)) / grid.hy;
            out.set_v(i, j, val);
        }
    }
    out.enforce_boundaries(grid);
    out
}

/// Unknown layout of one velocity component for the implicit solves.
struct ComponentLayout {
    lap: FlatLaplacian,
    offset: usize,
}

fn component_layouts(grid: &Grid) -> (ComponentLayout, ComponentLayout) {
    let normal = |b| match b {
        Boundary::Periodic => AxisBc::Periodic,
        Boundary::Wall => AxisBc::DirichletNode,
    };
    let tangential = |b| match b {
        Boundary::Periodic => AxisBc::Periodic,
        Boundary::Wall => AxisBc::DirichletMirror,
    };
    let count = |b, n: usize| match b {
        Boundary::Periodic => n,
        Boundary::Wall => n - 1,
    };
    let off = |b| match b {
        Boundary::Periodic => 0,
        Boundary::Wall => 1,
    };
    let u = ComponentLayout {
        lap: FlatLaplacian {
            mx: count(grid.x_boundary, grid.nx),
            my: grid.ny,
            hx: grid.hx,
            hy: grid.hy,
            bx: normal(grid.x_boundary),
            by: tangential(grid.y_boundary),
        },
        offset: off(grid.x_boundary),
    };
    let v = ComponentLayout {
        lap: FlatLaplacian {
            mx: grid.nx,
            my: count(grid.y_boundary, grid.ny),
            hx: grid.hx,
            hy: grid.hy,
            bx: tangential(grid.x_boundary),
            by: normal(grid.y_boundary),
        },
        offset: off(grid.y_boundary),
    };
    (u, v)
}

fn gather_u(layout: &ComponentLayout, f: &FaceField) -> Vec<f64> {
    let mut out = Vec::with_capacity(layout.lap.len());
    for j in 0..layout.lap.my {
        for i in 0..layout.lap.mx {
            out.push(f.u(i + layout.offset, j));
        }
    }
    out
}

fn gather_v(layout: &ComponentLayout, f: &FaceField) -> Vec<f64> {
    let mut out = Vec::with_capacity(layout.lap.len());
    for j in 0..layout.lap.my {
        for i in 0..layout.lap.mx {
            out.push(f.v(i, j + layout.offset));
        }
    }
    out
}

fn scatter_u(layout: &ComponentLayout, x: &[f64], f: &mut FaceField) {
    for j in 0..layout.lap.my {
        for i in 0..layout.lap.mx {
            f.set_u(i + layout.offset, j, x[j * layout.lap.mx + i]);
        }
    }
}

fn scatter_v(layout: &ComponentLayout, x: &[f64], f: &mut FaceField) {
    for j in 0..layout.lap.my {
        for i in 0..layout.lap.mx {
            f.set_v(i, j + layout.offset, x[j * layout.lap.mx + i]);
        }
    }
}

/// Provisional velocity: explicit advection and force, implicit viscosity,
/// no pressure.
pub fn momentum_step(state: &FluidState, force: &FaceField, dt: f64, opts: &StepperOptions) -> Result<FaceField> {
    let grid = &state.grid;
    let rho = state.material.rho();
    let nu = state.material.eta() / rho;
    let adv = advection(grid, &state.v);
    let mut rhs = state.v.clone();
    rhs.axpy(-dt, &adv);
    rhs.axpy(dt / rho, force);
    rhs.enforce_boundaries(grid);
    if nu == 0.0 {
        return Ok(rhs);
    }
    let (lu, lv) = component_layouts(grid);
    let mut out = FaceField::zeros(grid);
    let cg_opts = opts.cg(grid, opts.solve_tol, false);
    for (layout, is_u) in [(&lu, true), (&lv, false)] {
        let b = if is_u { gather_u(layout, &rhs) } else { gather_v(layout, &rhs) };
        let mut x = if is_u { gather_u(layout, &state.v) } else { gather_v(layout, &state.v) };
        let lap = layout.lap;
        let eig = SpectralLaplacian::new(&lap);
        let report = linsolve::conjugate_gradient(
            |xx: &[f64], o: &mut [f64]| {
                lap.apply(xx, o);
                for k in 0..xx.len() {
                    o[k] = xx[k] - dt * nu * o[k];
                }
            },
            Some(|v: &[f64], o: &mut [f64]| eig.apply_fn(|l| 1.0 / (1.0 - dt * nu * l), v, o)),
            &b,
            &mut x,
            cg_opts,
        );
        if !report.converged {
            return Err(Error::LinearSolveFailure {
                what: "viscous solve",
                iterations: report.iterations,
                residual: report.relative_residual,
            });
        }
        if is_u {
            scatter_u(layout, &x, &mut out);
        } else {
            scatter_v(layout, &x, &mut out);
        }
    }
    out.enforce_boundaries(grid);
    Ok(out)
}

/// Projects `v_star` onto discretely divergence-free fields. Returns the new
/// velocity and the pressure `phi` solving `lap phi = (rho/dt) div v_star`.
pub fn pressure_project(
    grid: &Grid,
    material: &Material,
    v_star: &FaceField,
    dt: f64,
    opts: &StepperOptions,
) -> Result<(FaceField, ScalarField)> {
    let rho = material.rho();
    let lap = FlatLaplacian::cells(grid);
    let div = grid::divergence(grid, v_star).interior();
    // -lap phi = -(rho/dt) div v*
    let b: Vec<f64> = div.iter().map(|d| -rho / dt * d).collect();
    let mut phi = vec![0.0; b.len()];
    let eig = SpectralLaplacian::new(&lap);
    let report = linsolve::conjugate_gradient(
        |x: &[f64], o: &mut [f64]| {
            lap.apply(x, o);
            o.iter_mut().for_each(|v| *v = -*v);
        },
        Some(|v: &[f64], o: &mut [f64]| eig.apply_fn(|l| if l == 0.0 { 0.0 } else { -1.0 / l }, v, o)),
        &b,
        &mut phi,
        opts.cg(grid, opts.solve_tol, lap.is_singular()),
    );
    if !report.converged {
        return Err(Error::PoissonSolveFailure {
            iterations: report.iterations,
            residual: report.relative_residual,
        });
    }
    let mut p = ScalarField::from_interior(grid, &phi);
    grid::sync_ghosts(grid, &mut p, BoundaryRule::ZeroNormalGradient);
    let g = grid::gradient(grid, &p);
    let mut v = v_star.clone();
    v.axpy(-dt / rho, &g);
    v.enforce_boundaries(grid);
    Ok((v, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub max_divergence: f64,
}

/// Advances `state` by `dt`.
pub fn step(state: &mut FluidState, dt: f64, opts: &StepperOptions) -> Result<StepReport> {
    check_time_step(state, dt, opts)?;
    let grid = state.grid;
    let (new_c, mu) = if opts.phase {
        let (c, mu) = phase_step(state, dt, opts)?;
        (Some(c), Some(mu))
    } else {
        (None, None)
    };
    let mut report = StepReport::default();
    if opts.flow {
        // force pairs mu^{n+1} with the advected level c^n
        let force = match &mu {
            Some(mu) => energy::capillary_force(&grid, &state.c, mu),
            None => FaceField::zeros(&grid),
        };
        let v_star = momentum_step(state, &force, dt, opts)?;
        let (v, p) = pressure_project(&grid, &state.material, &v_star, dt, opts)?;
        report.max_divergence = grid::divergence(&grid, &v).max_abs();
        state.v = v;
        state.p = p;
    }
    if let Some(c) = new_c {
        state.c = c;
    }
    state.time += dt;
    Ok(report)
}

/// Wall wetting residual of the current state (see
/// [`wetting::static_wetting_residual`]).
pub fn wetting_residual(state: &FluidState) -> f64 {
    wetting::static_wetting_residual(&state.grid, &state.c, &state.material)
}
