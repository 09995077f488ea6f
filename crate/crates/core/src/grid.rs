//! Uniform staggered (MAC) grid, field containers and the discrete
//! differential operators.
//!
//! Cell `(i, j)` covers `[i hx, (i+1) hx] x [j hy, (j+1) hy]`. Scalars live
//! at cell centres with one ghost layer. The x velocity lives on vertical
//! faces (`nx + 1` per row), the y velocity on horizontal faces. On a
//! periodic axis the last face duplicates the first.
//!
//! All wall normal derivatives are taken with respect to the outward normal
//! of the fluid domain.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x_boundary: Boundary,
    pub y_boundary: Boundary,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, x_boundary: Boundary, y_boundary: Boundary) -> Result<Grid> {
        if nx < 4 || ny < 4 {
            return Err(Error::invalid("grid", format!("need at least 4x4 cells, got {nx}x{ny}")));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::invalid("grid", "domain lengths must be positive"));
        }
        Ok(Grid {
            nx,
            ny,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
            x_boundary,
            y_boundary,
        })
    }

    pub fn periodic(n: usize, length: f64) -> Result<Grid> {
        Grid::new(n, n, length, length, Boundary::Periodic, Boundary::Periodic)
    }

    pub fn lx(&self) -> f64 {
        self.nx as f64 * self.hx
    }
    pub fn ly(&self) -> f64 {
        self.ny as f64 * self.hy
    }
    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx
    }
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.hy
    }
    pub fn h_min(&self) -> f64 {
        self.hx.min(self.hy)
    }

    pub fn boundary(&self, side: Side) -> Boundary {
        match side {
            Side::Left | Side::Right => self.x_boundary,
            Side::Bottom | Side::Top => self.y_boundary,
        }
    }

    pub fn wall_sides(&self) -> impl Iterator<Item = Side> + '_ {
        Side::ALL.into_iter().filter(|&s| self.boundary(s) == Boundary::Wall)
    }

    pub fn has_walls(&self) -> bool {
        self.wall_sides().next().is_some()
    }

    /// Number of cells along a side.
    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Left | Side::Right => self.ny,
            Side::Bottom | Side::Top => self.nx,
        }
    }

    /// Wall-adjacent cell for position `k` along `side`.
    pub fn side_cell(&self, side: Side, k: usize) -> (usize, usize) {
        match side {
            Side::Left => (0, k),
            Side::Right => (self.nx - 1, k),
            Side::Bottom => (k, 0),
            Side::Top => (k, self.ny - 1),
        }
    }

    /// Cell spacing normal to a side.
    pub fn normal_spacing(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hx,
            Side::Bottom | Side::Top => self.hy,
        }
    }

    /// Face length along a side.
    pub fn tangential_spacing(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hy,
            Side::Bottom | Side::Top => self.hx,
        }
    }

    /// Unique x-face indices that are not walls.
    pub fn x_faces(&self) -> std::ops::Range<usize> {
        match self.x_boundary {
            Boundary::Periodic => 0..self.nx,
            Boundary::Wall => 1..self.nx,
        }
    }

    /// Unique y-face indices that are not walls.
    pub fn y_faces(&self) -> std::ops::Range<usize> {
        match self.y_boundary {
            Boundary::Periodic => 0..self.ny,
            Boundary::Wall => 1..self.ny,
        }
    }
}

/// Cell-centred scalar with one ghost layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            nx: grid.nx,
            ny: grid.ny,
            data: vec![0.0; (grid.nx + 2) * (grid.ny + 2)],
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.data.fill(value);
        f
    }

    /// Samples `f(x, y)` at cell centres. Ghosts are left at zero.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                out.set(i, j, f(grid.x(i), grid.y(j)));
            }
        }
        out
    }

    pub fn from_interior(grid: &Grid, values: &[f64]) -> Self {
        let mut out = Self::zeros(grid);
        out.set_interior(values);
        out
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    fn idx(&self, i: isize, j: isize) -> usize {
        debug_assert!(i >= -1 && i <= self.nx as isize && j >= -1 && j <= self.ny as isize);
        ((j + 1) as usize) * (self.nx + 2) + (i + 1) as usize
    }

    /// Value at `(i, j)`, where `-1` and `n` address ghosts.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(j + 1) * (self.nx + 2) + i + 1]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let nx = self.nx;
        self.data[(j + 1) * (nx + 2) + i + 1] = v;
    }

    #[inline]
    pub fn set_at(&mut self, i: isize, j: isize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Interior values in row-major order (`j * nx + i`).
    pub fn interior(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            let start = (j + 1) * (self.nx + 2) + 1;
            out.extend_from_slice(&self.data[start..start + self.nx]);
        }
        out
    }

    pub fn set_interior(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.nx * self.ny);
        for j in 0..self.ny {
            let start = (j + 1) * (self.nx + 2) + 1;
            self.data[start..start + self.nx].copy_from_slice(&values[j * self.nx..(j + 1) * self.nx]);
        }
    }

    pub fn interior_iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.get(i, j)))
    }

    /// Applies `f` to every interior value, returning a new field.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = f(*v);
        }
        out
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = f(*a, b);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.interior_iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn has_non_finite(&self) -> bool {
        self.interior_iter().any(|v| !v.is_finite())
    }
}

/// Staggered vector field: x component on vertical faces, y component on
/// horizontal faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    nx: usize,
    ny: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: &Grid) -> Self {
        FaceField {
            nx: grid.nx,
            ny: grid.ny,
            u: vec![0.0; (grid.nx + 1) * grid.ny],
            v: vec![0.0; grid.nx * (grid.ny + 1)],
        }
    }

    /// Samples the x component at vertical-face centres and the y component at
    /// horizontal-face centres.
    pub fn from_fn(grid: &Grid, fu: impl Fn(f64, f64) -> f64, fv: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..=grid.nx {
                out.set_u(i, j, fu(i as f64 * grid.hx, grid.y(j)));
            }
        }
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                out.set_v(i, j, fv(grid.x(i), j as f64 * grid.hy));
            }
        }
        out.enforce_boundaries(grid);
        out
    }

    #[inline]
    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.u[j * (self.nx + 1) + i]
    }
    #[inline]
    pub fn v(&self, i: usize, j: usize) -> f64 {
        self.v[j * self.nx + i]
    }
    #[inline]
    pub fn set_u(&mut self, i: usize, j: usize, val: f64) {
        let nx = self.nx;
        self.u[j * (nx + 1) + i] = val;
    }
    #[inline]
    pub fn set_v(&mut self, i: usize, j: usize, val: f64) {
        let nx = self.nx;
        self.v[j * nx + i] = val;
    }

    /// Makes duplicated periodic faces agree and zeroes wall-normal faces.
    pub fn enforce_boundaries(&mut self, grid: &Grid) {
        let (nx, ny) = (grid.nx, grid.ny);
        for j in 0..ny {
            match grid.x_boundary {
                Boundary::Periodic => {
                    let w = self.u(0, j);
                    self.set_u(nx, j, w);
                }
                Boundary::Wall => {
                    self.set_u(0, j, 0.0);
                    self.set_u(nx, j, 0.0);
                }
            }
        }
        for i in 0..nx {
            match grid.y_boundary {
                Boundary::Periodic => {
                    let w = self.v(i, 0);
                    self.set_v(i, ny, w);
                }
                Boundary::Wall => {
                    self.set_v(i, 0, 0.0);
                    self.set_v(i, ny, 0.0);
                }
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.u.iter_mut().chain(self.v.iter_mut()).for_each(|x| *x *= a);
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &FaceField) {
        for (x, y) in self.u.iter_mut().zip(&other.u) {
            *x += a * y;
        }
        for (x, y) in self.v.iter_mut().zip(&other.v) {
            *x += a * y;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn has_non_finite(&self) -> bool {
        self.u.iter().chain(&self.v).any(|x| !x.is_finite())
    }

    /// Velocity interpolated to cell centres.
    pub fn cell_centred(&self, grid: &Grid) -> (ScalarField, ScalarField) {
        let mut cu = ScalarField::zeros(grid);
        let mut cv = ScalarField::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                cu.set(i, j, 0.5 * (self.u(i, j) + self.u(i + 1, j)));
                cv.set(i, j, 0.5 * (self.v(i, j) + self.v(i, j + 1)));
            }
        }
        (cu, cv)
    }
}

/// Outward normal derivative prescribed on each wall-adjacent cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WallGradient {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
}

impl WallGradient {
    pub fn zeros(grid: &Grid) -> Self {
        WallGradient {
            left: vec![0.0; grid.ny],
            right: vec![0.0; grid.ny],
            bottom: vec![0.0; grid.nx],
            top: vec![0.0; grid.nx],
        }
    }

    pub fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Vec<f64> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        }
    }
}

/// Ghost-filling rule on wall sides. Periodic sides always wrap.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryRule<'a> {
    ZeroNormalGradient,
    PrescribedNormalGradient(&'a WallGradient),
}

/// Fills the ghost layer of `f`. On a wall the one-sided difference
/// `(ghost - interior) / h_n` equals the prescribed outward derivative.
pub fn sync_ghosts(grid: &Grid, f: &mut ScalarField, rule: BoundaryRule<'_>) {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let slope = |side: Side, k: usize| match rule {
        BoundaryRule::ZeroNormalGradient => 0.0,
        BoundaryRule::PrescribedNormalGradient(g) => g.side(side)[k],
    };
    for j in 0..ny {
        let (l, r) = match grid.x_boundary {
            Boundary::Periodic => (f.at(nx - 1, j), f.at(0, j)),
            Boundary::Wall => (
                f.at(0, j) + slope(Side::Left, j as usize) * grid.hx,
                f.at(nx - 1, j) + slope(Side::Right, j as usize) * grid.hx,
            ),
        };
        f.set_at(-1, j, l);
        f.set_at(nx, j, r);
    }
    for i in 0..nx {
        let (b, t) = match grid.y_boundary {
            Boundary::Periodic => (f.at(i, ny - 1), f.at(i, 0)),
            Boundary::Wall => (
                f.at(i, 0) + slope(Side::Bottom, i as usize) * grid.hy,
                f.at(i, ny - 1) + slope(Side::Top, i as usize) * grid.hy,
            ),
        };
        f.set_at(i, -1, b);
        f.set_at(i, ny, t);
    }
}

/// Face-difference gradient. Requires synchronised ghosts.
pub fn gradient(grid: &Grid, f: &ScalarField) -> FaceField {
    let mut g = FaceField::zeros(grid);
    let (nx, ny) = (grid.nx, grid.ny);
    for j in 0..ny {
        for i in 0..=nx {
            let val = (f.at(i as isize, j as isize) - f.at(i as isize - 1, j as isize)) / grid.hx;
            g.set_u(i, j, val);
        }
    }
    for j in 0..=ny {
        for i in 0..nx {
            let val = (f.at(i as isize, j as isize) - f.at(i as isize, j as isize - 1)) / grid.hy;
            g.set_v(i, j, val);
        }
    }
    g
}

/// Cell divergence of a face field. Ghosts of the result are zero.
pub fn divergence(grid: &Grid, u: &FaceField) -> ScalarField {
    let mut d = ScalarField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let val = (u.u(i + 1, j) - u.u(i, j)) / grid.hx + (u.v(i, j + 1) - u.v(i, j)) / grid.hy;
            d.set(i, j, val);
        }
    }
    d
}

/// Five-point Laplacian; identical to `divergence(gradient(f))`.
pub fn laplacian(grid: &Grid, f: &ScalarField) -> ScalarField {
    let mut out = ScalarField::zeros(grid);
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            let c = f.at(i, j);
            let gx_r = (f.at(i + 1, j) - c) / grid.hx;
            let gx_l = (c - f.at(i - 1, j)) / grid.hx;
            let gy_t = (f.at(i, j + 1) - c) / grid.hy;
            let gy_b = (c - f.at(i, j - 1)) / grid.hy;
            out.set(i as usize, j as usize, (gx_r - gx_l) / grid.hx + (gy_t - gy_b) / grid.hy);
        }
    }
    out
}

/// Midpoint-rule integral over the physical cells.
pub fn integrate(grid: &Grid, f: &ScalarField) -> f64 {
    f.interior_iter().sum::<f64>() * grid.cell_area()
}

/// `sum a.b * hx * hy` over unique faces that are not walls.
pub fn integrate_faces(grid: &Grid, a: &FaceField, b: &FaceField) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.ny {
        for i in grid.x_faces() {
            s += a.u(i, j) * b.u(i, j);
        }
    }
    for j in grid.y_faces() {
        for i in 0..grid.nx {
            s += a.v(i, j) * b.v(i, j);
        }
    }
    s * grid.cell_area()
}

/// Arithmetic average of the two cells sharing each face. Requires ghosts.
pub fn face_average(grid: &Grid, f: &ScalarField) -> FaceField {
    let mut g = FaceField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let val = 0.5 * (f.at(i as isize, j as isize) + f.at(i as isize - 1, j as isize));
            g.set_u(i, j, val);
        }
    }
    for j in 0..=grid.ny {
        for i in 0..grid.nx {
            let val = 0.5 * (f.at(i as isize, j as isize) + f.at(i as isize, j as isize - 1));
            g.set_v(i, j, val);
        }
    }
    g
}

/// Boundary treatment of one axis for [`FlatLaplacian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisBc {
    Periodic,
    /// Zero normal gradient, wall half a cell beyond the last unknown.
    Neumann,
    /// Zero value at a wall half a cell beyond the last unknown (ghost = -x).
    DirichletMirror,
    /// Zero value one full cell beyond the last unknown.
    DirichletNode,
}

/// Five-point Laplacian acting on a flat row-major array without ghosts.
/// Used inside the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatLaplacian {
    pub mx: usize,
    pub my: usize,
    pub hx: f64,
    pub hy: f64,
    pub bx: AxisBc,
    pub by: AxisBc,
}

impl FlatLaplacian {
    /// Cell-centred Laplacian with zero-flux walls.
    pub fn cells(grid: &Grid) -> Self {
        let bc = |b| match b {
            Boundary::Periodic => AxisBc::Periodic,
            Boundary::Wall => AxisBc::Neumann,
        };
        FlatLaplacian {
            mx: grid.nx,
            my: grid.ny,
            hx: grid.hx,
            hy: grid.hy,
            bx: bc(grid.x_boundary),
            by: bc(grid.y_boundary),
        }
    }

    pub fn len(&self) -> usize {
        self.mx * self.my
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Contribution of the neighbour beyond an edge, as (coefficient on the
    /// edge value, whether the wrapped neighbour is used).
    #[inline]
    fn edge(bc: AxisBc) -> (f64, bool) {
        match bc {
            AxisBc::Periodic => (0.0, true),
            AxisBc::Neumann => (1.0, false),
            AxisBc::DirichletMirror => (-1.0, false),
            AxisBc::DirichletNode => (0.0, false),
        }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (mx, my) = (self.mx, self.my);
        debug_assert_eq!(x.len(), mx * my);
        let ix2 = 1.0 / (self.hx * self.hx);
        let iy2 = 1.0 / (self.hy * self.hy);
        let (ex, wrap_x) = Self::edge(self.bx);
        let (ey, wrap_y) = Self::edge(self.by);
        for j in 0..my {
            let row = j * mx;
            for i in 0..mx {
                let c = x[row + i];
                let left = if i > 0 {
                    x[row + i - 1]
                } else if wrap_x {
                    x[row + mx - 1]
                } else {
                    ex * c
                };
                let right = if i + 1 < mx {
                    x[row + i + 1]
                } else if wrap_x {
                    x[row]
                } else {
                    ex * c
                };
                let down = if j > 0 {
                    x[row - mx + i]
                } else if wrap_y {
                    x[(my - 1) * mx + i]
                } else {
                    ey * c
                };
                let up = if j + 1 < my {
                    x[row + mx + i]
                } else if wrap_y {
                    x[i]
                } else {
                    ey * c
                };
                out[row + i] = (left - 2.0 * c + right) * ix2 + (down - 2.0 * c + up) * iy2;
            }
        }
    }

    /// True when constants are in the null space (periodic or zero-flux on
    /// both axes).
    pub fn is_singular(&self) -> bool {
        let free = |b| matches!(b, AxisBc::Periodic | AxisBc::Neumann);
        free(self.bx) && free(self.by)
    }
}
