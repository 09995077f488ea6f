//! Lagrangian compressible neo-Hookean solid on a uniform quad mesh.
//!
//! Bilinear elements with 2x2 Gauss quadrature, lumped mass and explicit
//! central-difference (velocity Verlet) time stepping. Uncoupled from the
//! fluid.

use crate::error::{Error, Result};
use crate::grid::Side;

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn diag(a: f64, b: f64) -> Mat2 {
        Mat2([[a, 0.0], [0.0, b]])
    }

    pub fn rotation(theta: f64) -> Mat2 {
        let (s, c) = theta.sin_cos();
        Mat2([[c, -s], [s, c]])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// Inverse; caller guarantees a nonzero determinant.
    pub fn inverse(&self) -> Mat2 {
        let m = &self.0;
        let d = self.det();
        Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[0.0; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let a = &self.0;
        Mat2([[s * a[0][0], s * a[0][1]], [s * a[1][0], s * a[1][1]]])
    }

    /// `A : B`
    pub fn ddot(&self, o: &Mat2) -> f64 {
        let (a, b) = (&self.0, &o.0);
        a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidMaterial {
    /// Shear modulus.
    pub mu: f64,
    pub lambda: f64,
    pub rho0: f64,
}

impl SolidMaterial {
    pub fn validate(&self) -> Result<SolidMaterial> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::invalid("solid.mu", "must be positive"));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid("solid.lambda", "must be non-negative"));
        }
        if !(self.rho0 > 0.0) || !self.rho0.is_finite() {
            return Err(Error::invalid("solid.rho0", "must be positive"));
        }
        Ok(*self)
    }

    /// Longitudinal wave speed of the linearised material.
    pub fn wave_speed(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.rho0).sqrt()
    }
}

fn check_jacobian(f: &Mat2) -> Result<f64> {
    let j = f.det();
    if j > 0.0 {
        Ok(j)
    } else {
        Err(Error::Inverted { element: 0, jacobian: j })
    }
}

/// `W = (mu/2)(tr(F^T F) - 2) - mu ln J + (lambda/2)(ln J)^2`
pub fn strain_energy_density(m: &SolidMaterial, f: &Mat2) -> Result<f64> {
    let j = check_jacobian(f)?;
    let lj = j.ln();
    Ok(0.5 * m.mu * (f.ddot(f) - 2.0) - m.mu * lj + 0.5 * m.lambda * lj * lj)
}

/// `P = mu (F - F^{-T}) + lambda ln J F^{-T}`
pub fn first_piola(m: &SolidMaterial, f: &Mat2) -> Result<Mat2> {
    let j = check_jacobian(f)?;
    let f_it = f.inverse().transpose();
    Ok(f.scale(m.mu).add(&f_it.scale(m.lambda * j.ln() - m.mu)))
}

/// Cauchy stress `J^{-1} P F^T`. Diagnostic only.
pub fn cauchy_stress(m: &SolidMaterial, f: &Mat2) -> Result<Mat2> {
    let p = first_piola(m, f)?;
    Ok(p.mul(&f.transpose()).scale(1.0 / f.det()))
}

/// Boundary condition of one side of the reference rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideCondition {
    Free,
    /// Zero normal displacement, free tangential motion.
    Roller,
    /// Dead-load nominal traction (force per reference length), scaled in
    /// time by the load ramp.
    Traction([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidSides {
    pub left: SideCondition,
    pub right: SideCondition,
    pub bottom: SideCondition,
    pub top: SideCondition,
}

impl SolidSides {
    pub fn side(&self, s: Side) -> SideCondition {
        match s {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Bottom => self.bottom,
            Side::Top => self.top,
        }
    }
}

impl Default for SolidSides {
    fn default() -> Self {
        SolidSides {
            left: SideCondition::Free,
            right: SideCondition::Free,
            bottom: SideCondition::Free,
            top: SideCondition::Free,
        }
    }
}

/// Time profile of applied tractions: linear ramp to full load over
/// `ramp`, then constant. A zero ramp applies the full load at once.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LoadRamp {
    pub ramp: f64,
}

impl LoadRamp {
    pub fn factor(&self, t: f64) -> f64 {
        if self.ramp <= 0.0 {
            1.0
        } else {
            (t / self.ramp).clamp(0.0, 1.0)
        }
    }
}

/// Uniform rectangular reference mesh `[0, lx] x [0, ly]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidMesh {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

/// Gauss points on [-1, 1].
const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

impl SolidMesh {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("solid mesh", "needs at least one element per direction"));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::invalid("solid mesh", "lengths must be positive"));
        }
        Ok(SolidMesh { nx, ny, lx, ly })
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn elements(&self) -> usize {
        self.nx * self.ny
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn position(&self, n: usize) -> [f64; 2] {
        let (i, j) = (n % (self.nx + 1), n / (self.nx + 1));
        [i as f64 * self.hx(), j as f64 * self.hy()]
    }

    /// Nodes of element `e`, counter-clockwise from the lower left.
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (i, j) = (e % self.nx, e / self.nx);
        [self.node(i, j), self.node(i + 1, j), self.node(i + 1, j + 1), self.node(i, j + 1)]
    }

    /// Nodes on one side, in order along the side.
    pub fn side_nodes(&self, side: Side) -> Vec<usize> {
        match side {
            Side::Left => (0..=self.ny).map(|j| self.node(0, j)).collect(),
            Side::Right => (0..=self.ny).map(|j| self.node(self.nx, j)).collect(),
            Side::Bottom => (0..=self.nx).map(|i| self.node(i, 0)).collect(),
            Side::Top => (0..=self.nx).map(|i| self.node(i, self.ny)).collect(),
        }
    }

    fn side_spacing(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hy(),
            Side::Bottom | Side::Top => self.hx(),
        }
    }

    /// Reference gradients of the four shape functions at quadrature point
    /// `q` (0..4), and the quadrature weight (area share).
    pub fn shape_gradients(&self, q: usize) -> ([[f64; 2]; 4], f64) {
        let (xi, et) = (GAUSS[q % 2], GAUSS[q / 2]);
        let (hx, hy) = (self.hx(), self.hy());
        let dx = 2.0 / hx;
        let dy = 2.0 / hy;
        let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        let mut g = [[0.0; 2]; 4];
        for (a, &(sx, sy)) in corners.iter().enumerate() {
            g[a][0] = 0.25 * sx * (1.0 + sy * et) * dx;
            g[a][1] = 0.25 * sy * (1.0 + sx * xi) * dy;
        }
        (g, 0.25 * hx * hy)
    }
}

/// Deformation gradient `F = I + grad_X u` at quadrature point `q` of
/// element `e`.
pub fn deformation_gradient(mesh: &SolidMesh, u: &[[f64; 2]], e: usize, q: usize) -> Mat2 {
    let nodes = mesh.element_nodes(e);
    let (g, _) = mesh.shape_gradients(q);
    let mut f = Mat2::IDENTITY;
    for a in 0..4 {
        let ua = u[nodes[a]];
        for i in 0..2 {
            for j in 0..2 {
                f.0[i][j] += ua[i] * g[a][j];
            }
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolidState {
    pub time: f64,
    pub mesh: SolidMesh,
    pub material: SolidMaterial,
    pub sides: SolidSides,
    pub load: LoadRamp,
    pub u: Vec<[f64; 2]>,
    pub udot: Vec<[f64; 2]>,
    mass: Vec<f64>,
    /// Total force at the current configuration, cached between steps.
    force: Option<Vec<[f64; 2]>>,
}

impl SolidState {
    pub fn new(mesh: SolidMesh, material: SolidMaterial, sides: SolidSides, load: LoadRamp) -> Result<Self> {
        let material = material.validate()?;
        let mut mass = vec![0.0; mesh.nodes()];
        let share = 0.25 * material.rho0 * mesh.hx() * mesh.hy();
        for e in 0..mesh.elements() {
            for n in mesh.element_nodes(e) {
                mass[n] += share;
            }
        }
        Ok(SolidState {
            time: 0.0,
            mesh,
            material,
            sides,
            load,
            u: vec![[0.0; 2]; mesh.nodes()],
            udot: vec![[0.0; 2]; mesh.nodes()],
            mass,
            force: None,
        })
    }

    pub fn lumped_mass(&self) -> &[f64] {
        &self.mass
    }

    /// Sets displacement and velocity, enforcing the supports.
    pub fn set_fields(&mut self, u: Vec<[f64; 2]>, udot: Vec<[f64; 2]>) {
        self.u = u;
        self.udot = udot;
        self.force = None;
        let constrained = supported_components(&self.mesh, &self.sides);
        for (n, comp) in constrained {
            self.u[n][comp] = 0.0;
            self.udot[n][comp] = 0.0;
        }
    }

    pub fn stable_dt(&self) -> f64 {
        0.8 * self.mesh.hx().min(self.mesh.hy()) / self.material.wave_speed()
    }

    /// Displacement of the node at mid-height of the right side.
    pub fn tip_displacement(&self) -> [f64; 2] {
        self.u[self.mesh.node(self.mesh.nx, self.mesh.ny / 2)]
    }
}

/// (node, component) pairs fixed by roller supports.
fn supported_components(mesh: &SolidMesh, sides: &SolidSides) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for side in Side::ALL {
        if sides.side(side) == SideCondition::Roller {
            let comp = match side {
                Side::Left | Side::Right => 0,
                Side::Bottom | Side::Top => 1,
            };
            out.extend(mesh.side_nodes(side).into_iter().map(|n| (n, comp)));
        }
    }
    out
}

/// Internal nodal forces `-int P : grad N_a`.
pub fn internal_forces(state: &SolidState) -> Result<Vec<[f64; 2]>> {
    let mesh = &state.mesh;
    let mut f = vec![[0.0; 2]; mesh.nodes()];
    for e in 0..mesh.elements() {
        let nodes = mesh.element_nodes(e);
        for q in 0..4 {
            let def = deformation_gradient(mesh, &state.u, e, q);
            let p = first_piola(&state.material, &def).map_err(|err| with_element(err, e))?;
            let (g, w) = mesh.shape_gradients(q);
            for a in 0..4 {
                let pg = p.apply(g[a]);
                f[nodes[a]][0] -= w * pg[0];
                f[nodes[a]][1] -= w * pg[1];
            }
        }
    }
    Ok(f)
}

fn with_element(err: Error, e: usize) -> Error {
    match err {
        Error::Inverted { jacobian, .. } => Error::Inverted { element: e, jacobian },
        other => other,
    }
}

/// Consistent nodal loads of the side tractions at time `t`.
pub fn external_forces(state: &SolidState, t: f64) -> Vec<[f64; 2]> {
    let mesh = &state.mesh;
    let mut f = vec![[0.0; 2]; mesh.nodes()];
    let s = state.load.factor(t);
    for side in Side::ALL {
        if let SideCondition::Traction(tr) = state.sides.side(side) {
            let half = 0.5 * mesh.side_spacing(side) * s;
            let nodes = mesh.side_nodes(side);
            for pair in nodes.windows(2) {
                for &n in pair {
                    f[n][0] += half * tr[0];
                    f[n][1] += half * tr[1];
                }
            }
        }
    }
    f
}

/// Total nodal force (internal plus external) with supported components
/// zeroed.
pub fn assemble_forces(state: &SolidState) -> Result<Vec<[f64; 2]>> {
    let mut f = internal_forces(state)?;
    for (a, b) in f.iter_mut().zip(external_forces(state, state.time)) {
        a[0] += b[0];
        a[1] += b[1];
    }
    for (n, comp) in supported_components(&state.mesh, &state.sides) {
        f[n][comp] = 0.0;
    }
    Ok(f)
}

/// Power of the applied tractions, `sum f_ext . udot`.
pub fn traction_power(state: &SolidState) -> f64 {
    external_forces(state, state.time)
        .iter()
        .zip(&state.udot)
        .map(|(f, v)| f[0] * v[0] + f[1] * v[1])
        .sum()
}

/// `(kinetic, strain)`. Kinetic energy uses the lumped mass.
pub fn solid_energy(state: &SolidState) -> Result<(f64, f64)> {
    let kinetic = 0.5
        * state
            .udot
            .iter()
            .zip(&state.mass)
            .map(|(v, m)| m * (v[0] * v[0] + v[1] * v[1]))
            .sum::<f64>();
    let mesh = &state.mesh;
    let mut strain = 0.0;
    for e in 0..mesh.elements() {
        for q in 0..4 {
            let f = deformation_gradient(mesh, &state.u, e, q);
            let w = mesh.shape_gradients(q).1;
            strain += w * strain_energy_density(&state.material, &f).map_err(|err| with_element(err, e))?;
        }
    }
    Ok((kinetic, strain))
}

/// One velocity-Verlet step. Returns the external work over the step by the
/// trapezoidal rule on the traction power.
pub fn advance_solid(state: &mut SolidState, dt: f64) -> Result<f64> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    let limit = state.stable_dt();
    if dt > limit {
        return Err(Error::CflViolation {
            dt,
            limit,
            bound: "elastic wave",
        });
    }
    let p0 = traction_power(state);
    let f0 = match state.force.take() {
        Some(f) => f,
        None => assemble_forces(state)?,
    };
    let supports = supported_components(&state.mesh, &state.sides);
    let mut u = state.u.clone();
    let mut half = state.udot.clone();
    for n in 0..u.len() {
        for k in 0..2 {
            half[n][k] += 0.5 * dt * f0[n][k] / state.mass[n];
            u[n][k] += dt * half[n][k];
        }
    }
    for &(n, comp) in &supports {
        u[n][comp] = 0.0;
        half[n][comp] = 0.0;
    }
    let mut next = SolidState {
        time: state.time + dt,
        u,
        udot: half,
        force: None,
        ..state.clone()
    };
    let f1 = assemble_forces(&next)?;
    for n in 0..next.udot.len() {
        for k in 0..2 {
            next.udot[n][k] += 0.5 * dt * f1[n][k] / next.mass[n];
        }
    }
    next.force = Some(f1);
    let p1 = traction_power(&next);
    *state = next;
    Ok(0.5 * dt * (p0 + p1))
}
