//! Wall wettability.
//!
//! The solid-fluid surface energy is `gamma_sf(c) = sum_i gamma_si g(c_i)`
//! with the cubic Hermite interpolant `g(c) = c^2 (3 - 2c)`. The static
//! wetting condition `(3/4) eps sigma_i dc_i/dn + d gamma_sf / dc_i = 0`
//! fixes the outward normal derivative of each phase field at the wall.
//!
//! Walls are rigid and stationary.

use crate::energy::PhaseTriple;
use crate::grid::{Grid, Side, WallGradient};
use crate::material::Material;

pub fn interp(c: f64) -> f64 {
    c * c * (3.0 - 2.0 * c)
}

pub fn interp_derivative(c: f64) -> f64 {
    6.0 * c * (1.0 - c)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WallEnergyModel {
    pub gamma_s: [f64; 3],
}

impl WallEnergyModel {
    pub fn new(gamma_s: [f64; 3]) -> Self {
        WallEnergyModel { gamma_s }
    }

    /// Wall energies giving the contact angle `theta` (radians, measured
    /// through phase 1) between phases 1 and 2, with `gamma_s3 = 0`.
    pub fn young(theta: f64, gamma12: f64) -> Self {
        let h = 0.5 * theta.cos() * gamma12;
        WallEnergyModel::new([-h, h, 0.0])
    }

    /// `gamma_sf` for the phase values of one wall cell.
    pub fn wall_energy(&self, c: [f64; 3]) -> f64 {
        (0..3).map(|i| self.gamma_s[i] * interp(c[i])).sum()
    }

    /// `d gamma_sf / d c_i`
    pub fn energy_derivative(&self, i: usize, c: f64) -> f64 {
        self.gamma_s[i] * interp_derivative(c)
    }

    /// Prescribed outward normal derivative `h_i` of phase `i`.
    pub fn wetting_flux(&self, i: usize, c: f64, sigma: f64, epsilon: f64) -> f64 {
        -4.0 / (3.0 * epsilon * sigma) * self.energy_derivative(i, c)
    }

    pub fn is_neutral(&self) -> bool {
        self.gamma_s.iter().all(|&g| g == self.gamma_s[0])
    }

    /// Largest `|gamma_si| / sigma_i`; sets the wall stabilisation.
    pub fn stiffness(&self, sigma: [f64; 3]) -> f64 {
        (0..3).map(|i| self.gamma_s[i].abs() / sigma[i]).fold(0.0, f64::max)
    }
}

/// Wall energy model for each side. Sides that are periodic ignore theirs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WallSides {
    pub left: WallEnergyModel,
    pub right: WallEnergyModel,
    pub bottom: WallEnergyModel,
    pub top: WallEnergyModel,
}

impl WallSides {
    pub fn uniform(model: WallEnergyModel) -> Self {
        WallSides {
            left: model,
            right: model,
            bottom: model,
            top: model,
        }
    }

    pub fn side(&self, side: Side) -> &WallEnergyModel {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut WallEnergyModel {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &WallEnergyModel> {
        [&self.left, &self.right, &self.bottom, &self.top].into_iter()
    }
}

fn wall_cell_phases(grid: &Grid, c: &PhaseTriple, side: Side, k: usize) -> [f64; 3] {
    let (i, j) = grid.side_cell(side, k);
    [c.c[0].get(i, j), c.c[1].get(i, j), c.c[2].get(i, j)]
}

/// Per-phase wall gradients `h_i` evaluated from the wall-adjacent cells.
pub fn wetting_gradients(grid: &Grid, c: &PhaseTriple, material: &Material) -> [WallGradient; 3] {
    let sigma = material.sigma();
    let eps = material.epsilon();
    let mut out = [WallGradient::zeros(grid), WallGradient::zeros(grid), WallGradient::zeros(grid)];
    for side in grid.wall_sides() {
        let model = material.walls().side(side);
        for k in 0..grid.side_len(side) {
            let cw = wall_cell_phases(grid, c, side, k);
            for (p, grad) in out.iter_mut().enumerate() {
                grad.side_mut(side)[k] = model.wetting_flux(p, cw[p], sigma[p], eps);
            }
        }
    }
    out
}

/// Line integral of `gamma_sf` over all wall faces.
pub fn wall_energy_integral(grid: &Grid, c: &PhaseTriple, material: &Material) -> f64 {
    let mut total = 0.0;
    for side in grid.wall_sides() {
        let model = material.walls().side(side);
        let ds = grid.tangential_spacing(side);
        for k in 0..grid.side_len(side) {
            total += model.wall_energy(wall_cell_phases(grid, c, side, k)) * ds;
        }
    }
    total
}

/// Largest `|(3/4) eps sigma_i dc_i/dn + d gamma_sf/dc_i|` over wall cells,
/// with `dc_i/dn` read from the ghost layer of `c`.
pub fn static_wetting_residual(grid: &Grid, c: &PhaseTriple, material: &Material) -> f64 {
    let sigma = material.sigma();
    let eps = material.epsilon();
    let mut worst: f64 = 0.0;
    for side in grid.wall_sides() {
        let model = material.walls().side(side);
        let hn = grid.normal_spacing(side);
        for k in 0..grid.side_len(side) {
            let (i, j) = grid.side_cell(side, k);
            let (gi, gj) = match side {
                Side::Left => (-1, j as isize),
                Side::Right => (grid.nx as isize, j as isize),
                Side::Bottom => (i as isize, -1),
                Side::Top => (i as isize, grid.ny as isize),
            };
            for p in 0..3 {
                let inner = c.c[p].get(i, j);
                let dn = (c.c[p].at(gi, gj) - inner) / hn;
                let r = 0.75 * eps * sigma[p] * dn + model.energy_derivative(p, inner);
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}
