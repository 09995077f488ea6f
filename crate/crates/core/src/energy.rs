//! Ternary Ginzburg-Landau free energy.
//!
//! `Psi = (12/eps) F(c) + sum_i (3/8) eps sigma_i |grad c_i|^2` with the
//! quartic wells `F = sum_i (sigma_i/2) c_i^2 (1 - c_i)^2`.
//!
//! The discrete energy sums the gradient term over non-wall faces and the
//! bulk term over cells; [`variational_derivative`] is its exact discrete
//! gradient (wall contributions come in through the ghost layer set by the
//! wetting rule).

use crate::grid::{self, BoundaryRule, FaceField, Grid, ScalarField};
use crate::material::Material;
use crate::wetting;

/// Volume fractions of the three fluids.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTriple {
    pub c: [ScalarField; 3],
}

impl PhaseTriple {
    pub fn new(c1: ScalarField, c2: ScalarField, c3: ScalarField) -> Self {
        PhaseTriple { c: [c1, c2, c3] }
    }

    /// Builds the triple from `c1`, `c2` and sets `c3 = 1 - c1 - c2`.
    pub fn from_two(grid: &Grid, c1: ScalarField, c2: ScalarField) -> Self {
        let mut c3 = ScalarField::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                c3.set(i, j, 1.0 - c1.get(i, j) - c2.get(i, j));
            }
        }
        PhaseTriple { c: [c1, c2, c3] }
    }

    pub fn uniform(grid: &Grid, c: [f64; 3]) -> Self {
        PhaseTriple {
            c: c.map(|v| ScalarField::constant(grid, v)),
        }
    }

    /// Fills ghosts: periodic wrap, and the static-wetting gradient on walls.
    pub fn sync(&mut self, grid: &Grid, material: &Material) {
        if grid.has_walls() {
            let h = wetting::wetting_gradients(grid, self, material);
            for (c, h) in self.c.iter_mut().zip(&h) {
                grid::sync_ghosts(grid, c, BoundaryRule::PrescribedNormalGradient(h));
            }
        } else {
            for c in self.c.iter_mut() {
                grid::sync_ghosts(grid, c, BoundaryRule::ZeroNormalGradient);
            }
        }
    }

    /// `max |1 - sum_i c_i|` over cells.
    pub fn sum_defect(&self) -> f64 {
        let [a, b, c] = &self.c;
        a.interior_iter()
            .zip(b.interior_iter())
            .zip(c.interior_iter())
            .fold(0.0, |m, ((x, y), z)| m.max((1.0 - x - y - z).abs()))
    }

    pub fn masses(&self, grid: &Grid) -> [f64; 3] {
        [0, 1, 2].map(|i| grid::integrate(grid, &self.c[i]))
    }
}

/// Chemical potentials and the Lagrange multiplier that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChemPotTriple {
    pub mu: [ScalarField; 3],
    pub beta: ScalarField,
}

impl ChemPotTriple {
    /// Zero normal gradient on walls (no-flux condition for `mu`).
    pub fn sync(&mut self, grid: &Grid) {
        for m in self.mu.iter_mut() {
            grid::sync_ghosts(grid, m, BoundaryRule::ZeroNormalGradient);
        }
    }
}

/// `dF/dc_i = sigma_i c (1 - c) (1 - 2c)`
#[inline]
pub fn bulk_derivative(c: f64, sigma: f64) -> f64 {
    sigma * c * (1.0 - c) * (1.0 - 2.0 * c)
}

#[inline]
fn well(c: f64, sigma: f64) -> f64 {
    let q = c * (1.0 - c);
    0.5 * sigma * q * q
}

/// Pointwise bulk density `F` (without the `12/eps` factor).
pub fn bulk_density(grid: &Grid, c: &PhaseTriple, material: &Material) -> ScalarField {
    let s = material.sigma();
    let mut out = ScalarField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = (0..3).map(|p| well(c.c[p].get(i, j), s[p])).sum();
            out.set(i, j, v);
        }
    }
    out
}

/// `sum over non-wall faces of |grad c|^2 * hx * hy`. Requires ghosts on
/// periodic axes.
fn gradient_norm_sq(grid: &Grid, c: &ScalarField) -> f64 {
    let g = grid::gradient(grid, c);
    grid::integrate_faces(grid, &g, &g)
}

/// Total free energy `int Psi dOmega`. Requires synchronised ghosts.
pub fn free_energy(grid: &Grid, c: &PhaseTriple, material: &Material) -> f64 {
    let eps = material.epsilon();
    let s = material.sigma();
    let bulk = grid::integrate(grid, &bulk_density(grid, c, material)) * 12.0 / eps;
    let interfacial: f64 = (0..3).map(|p| 0.375 * eps * s[p] * gradient_norm_sq(grid, &c.c[p])).sum();
    bulk + interfacial
}

/// Cell-centred `Psi`; each non-wall face splits its `|grad c|^2` between
/// its two cells, so `integrate(free_energy_density) == free_energy`.
pub fn free_energy_density(grid: &Grid, c: &PhaseTriple, material: &Material) -> ScalarField {
    let eps = material.epsilon();
    let s = material.sigma();
    let mut out = bulk_density(grid, c, material).map(|f| f * 12.0 / eps);
    for p in 0..3 {
        let g = grid::gradient(grid, &c.c[p]);
        let w = 0.375 * eps * s[p] * 0.5;
        let (nx, ny) = (grid.nx, grid.ny);
        for j in 0..ny {
            for i in grid.x_faces() {
                let e = w * g.u(i, j) * g.u(i, j);
                let left = if i == 0 { nx - 1 } else { i - 1 };
                out.set(left, j, out.get(left, j) + e);
                out.set(i, j, out.get(i, j) + e);
            }
        }
        for j in grid.y_faces() {
            for i in 0..nx {
                let e = w * g.v(i, j) * g.v(i, j);
                let below = if j == 0 { ny - 1 } else { j - 1 };
                out.set(i, below, out.get(i, below) + e);
                out.set(i, j, out.get(i, j) + e);
            }
        }
    }
    out
}

/// `(12/eps) dF/dc_i - (3/4) eps sigma_i lap c_i`. Requires ghosts.
pub fn variational_derivative(grid: &Grid, c: &ScalarField, sigma: f64, material: &Material) -> ScalarField {
    let eps = material.epsilon();
    let lap = grid::laplacian(grid, c);
    let mut out = ScalarField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = 12.0 / eps * bulk_derivative(c.get(i, j), sigma) - 0.75 * eps * sigma * lap.get(i, j);
            out.set(i, j, v);
        }
    }
    out
}

/// `beta = -(sum_j d_j/sigma_j) / (sum_j 1/sigma_j)`, which makes
/// `sum_i (d_i + beta)/sigma_i` vanish pointwise.
pub fn lagrange_multiplier(grid: &Grid, d: [&ScalarField; 3], material: &Material) -> ScalarField {
    let s = material.sigma();
    let norm = material.inverse_sigma_sum();
    let mut beta = ScalarField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let w: f64 = (0..3).map(|p| d[p].get(i, j) / s[p]).sum();
            beta.set(i, j, -w / norm);
        }
    }
    beta
}

/// `mu_i = delta Psi / delta c_i + beta`. Requires synchronised ghosts on
/// `c`; the returned potentials have synchronised ghosts.
pub fn chemical_potentials(grid: &Grid, c: &PhaseTriple, material: &Material) -> ChemPotTriple {
    let s = material.sigma();
    let d = [0, 1, 2].map(|p| variational_derivative(grid, &c.c[p], s[p], material));
    let beta = lagrange_multiplier(grid, [&d[0], &d[1], &d[2]], material);
    let mu = d.map(|di| di.zip_map(&beta, |a, b| a + b));
    let mut out = ChemPotTriple { mu, beta };
    out.sync(grid);
    out
}

/// Capillary force in potential form, `sum_i mu_i grad c_i`, on faces.
///
/// `mu` is averaged to faces. With this pairing the work done by the force
/// on a discretely divergence-free velocity exactly cancels the energy change
/// produced by centred conservative advection of `c`. Wall-normal faces carry
/// zero force.
pub fn capillary_force(grid: &Grid, c: &PhaseTriple, mu: &ChemPotTriple) -> FaceField {
    let mut f = FaceField::zeros(grid);
    for p in 0..3 {
        let g = grid::gradient(grid, &c.c[p]);
        let m = grid::face_average(grid, &mu.mu[p]);
        for (out, (a, b)) in f.u.iter_mut().zip(g.u.iter().zip(&m.u)) {
            *out += a * b;
        }
        for (out, (a, b)) in f.v.iter_mut().zip(g.v.iter().zip(&m.v)) {
            *out += a * b;
        }
    }
    f.enforce_boundaries(grid);
    f
}
