//! Post-processing of fluid snapshots: contact angle, lens angles and
//! interface excess energy.

use crate::energy;
use crate::error::{Error, Result};
use crate::output::Snapshot;
use crate::wetting;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Angle,
    Lens,
    Sigma,
}

impl std::str::FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "angle" => Ok(Quantity::Angle),
            "lens" => Ok(Quantity::Lens),
            "sigma" => Ok(Quantity::Sigma),
            _ => Err(format!("unknown quantity `{s}` (angle, lens or sigma)")),
        }
    }
}

/// Named results of one measurement, printed as `key = value`.
pub fn measure(snap: &Snapshot, q: Quantity) -> Result<Vec<(&'static str, f64)>> {
    Ok(match q {
        Quantity::Angle => {
            let a = contact_angle(snap)?;
            vec![("theta_deg", a.theta.to_degrees()), ("cos_theta", a.theta.cos()), ("radius", a.radius)]
        }
        Quantity::Lens => {
            let a = lens_angles(snap)?;
            vec![("theta1_deg", a[0]), ("theta2_deg", a[1]), ("theta3_deg", a[2])]
        }
        Quantity::Sigma => vec![("sigma", interface_energy(snap)?)],
    })
}

type Point = [f64; 2];

/// Points where `f` crosses `level` between neighbouring cell centres, by
/// linear interpolation. `keep` filters on the interpolated position and
/// the interpolation weight.
fn crossings(snap: &Snapshot, f: &dyn Fn(usize) -> f64, level: f64, keep: &dyn Fn(Point, usize, usize, f64) -> bool) -> Vec<Point> {
    let g = &snap.grid;
    let (nx, ny) = (g.nx, g.ny);
    let mut pts = Vec::new();
    let mut test = |a: usize, b: usize, pa: Point, pb: Point| {
        let (fa, fb) = (f(a) - level, f(b) - level);
        if fa == 0.0 || fa * fb < 0.0 {
            let s = fa / (fa - fb);
            let p = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            if keep(p, a, b, s) {
                pts.push(p);
            }
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            let a = j * nx + i;
            let pa = [g.x(i), g.y(j)];
            if i + 1 < nx {
                test(a, a + 1, pa, [g.x(i + 1), g.y(j)]);
            }
            if j + 1 < ny {
                test(a, a + nx, pa, [g.x(i), g.y(j + 1)]);
            }
        }
    }
    pts
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations; returns the
/// eigenvector of the smallest eigenvalue.
fn smallest_eigenvector(mut a: [[f64; 4]; 4]) -> [f64; 4] {
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let k = (0..4).min_by(|&i, &j| a[i][i].total_cmp(&a[j][j])).unwrap();
    [v[0][k], v[1][k], v[2][k], v[3][k]]
}

/// Circle or straight line fitted to points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Circle { center: Point, radius: f64 },
    Line { point: Point, direction: Point },
}

impl Curve {
    /// Algebraic fit of `A (x^2 + y^2) + B x + C y + D = 0`, in coordinates
    /// centred on the data and scaled to unit spread.
    pub fn fit(pts: &[Point]) -> Option<Curve> {
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let scale = (pts.iter().map(|p| (p[0] - mx).powi(2) + (p[1] - my).powi(2)).sum::<f64>() / n).sqrt();
        if !(scale > 0.0) {
            return None;
        }
        let mut m = [[0.0; 4]; 4];
        for p in pts {
            let (x, y) = ((p[0] - mx) / scale, (p[1] - my) / scale);
            let row = [x * x + y * y, x, y, 1.0];
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] += row[i] * row[j];
                }
            }
        }
        let [a, b, c, d] = smallest_eigenvector(m);
        let lin = (b * b + c * c).sqrt();
        // curvature radius in scaled units far beyond the data spread: a line
        if a.abs() < 1e-6 * lin {
            let direction = [-c / lin, b / lin];
            // closest point of the line to the data centre
            let off = -d / lin;
            let normal = [b / lin, c / lin];
            let point = [mx + scale * off * normal[0], my + scale * off * normal[1]];
            return Some(Curve::Line { point, direction });
        }
        let cx = -b / (2.0 * a);
        let cy = -c / (2.0 * a);
        let r2 = cx * cx + cy * cy - d / a;
        if !(r2 > 0.0) {
            return None;
        }
        Some(Curve::Circle {
            center: [mx + scale * cx, my + scale * cy],
            radius: scale * r2.sqrt(),
        })
    }

    pub fn closest_point(&self, p: Point) -> Point {
        match *self {
            Curve::Circle { center, radius } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let r = dx.hypot(dy).max(1e-300);
                [center[0] + radius * dx / r, center[1] + radius * dy / r]
            }
            Curve::Line { point, direction } => {
                let t = (p[0] - point[0]) * direction[0] + (p[1] - point[1]) * direction[1];
                [point[0] + t * direction[0], point[1] + t * direction[1]]
            }
        }
    }

    /// Unit tangent at a point on the curve (arbitrary orientation).
    pub fn tangent(&self, p: Point) -> Point {
        match *self {
            Curve::Circle { center, .. } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let r = dx.hypot(dy);
                [-dy / r, dx / r]
            }
            Curve::Line { direction, .. } => direction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactAngle {
    /// Radians, measured through phase 1.
    pub theta: f64,
    pub radius: f64,
    pub center: Point,
}

/// Contact angle of a phase-1 drop on the bottom wall, from a circle fitted
/// to the `c1 = 1/2` contour more than `2 eps` away from the wall.
pub fn contact_angle(snap: &Snapshot) -> Result<ContactAngle> {
    let eps = snap.params.epsilon;
    let c1 = &snap.c[0];
    let pts = crossings(snap, &|k| c1[k], 0.5, &|p, _, _, _| p[1] > 2.0 * eps);
    match Curve::fit(&pts) {
        Some(Curve::Circle { center, radius }) => {
            let cos = (-center[1] / radius).clamp(-1.0, 1.0);
            Ok(ContactAngle {
                theta: cos.acos(),
                radius,
                center,
            })
        }
        Some(Curve::Line { .. }) => Err(Error::ContourNotFound("drop contour is straight".into())),
        None => Err(Error::ContourNotFound(format!("c1 = 1/2 contour has {} usable points", pts.len()))),
    }
}

const PAIRS: [(usize, usize, usize); 3] = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];

/// Angles in degrees of the sectors occupied by phases 1, 2 and 3 at the
/// triple junctions of a lens, averaged over the two junctions.
pub fn lens_angles(snap: &Snapshot) -> Result<[f64; 3]> {
    let eps = snap.params.epsilon;
    let g = &snap.grid;
    let nx = g.nx;
    let c = &snap.c;
    // split junction search at the lens centroid
    let mass: f64 = c[0].iter().sum();
    if !(mass > 0.0) {
        return Err(Error::ContourNotFound("no phase 1 present".into()));
    }
    let xbar = c[0].iter().enumerate().map(|(k, v)| v * g.x(k % nx)).sum::<f64>() / mass;
    let pair_points: Vec<Vec<Point>> = PAIRS
        .iter()
        .map(|&(a, b, o)| {
            let diff = |k: usize| c[a][k] - c[b][k];
            crossings(snap, &diff, 0.0, &|_, ka, kb, s| (1.0 - s) * c[o][ka] + s * c[o][kb] < 0.1)
        })
        .collect();
    let mut total = [0.0; 3];
    for left in [true, false] {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (k, ((a, b), cc)) in c[0].iter().zip(&c[1]).zip(&c[2]).enumerate() {
            let x = g.x(k % nx);
            if (x < xbar) == left {
                let m = a.min(*b).min(*cc);
                if m > best.0 {
                    best = (m, k);
                }
            }
        }
        if best.0 < 0.1 {
            return Err(Error::ContourNotFound("no triple junction".into()));
        }
        let t0 = [g.x(best.1 % nx), g.y(best.1 / nx)];
        total = add3(total, junction_angles(&pair_points, t0, eps)?);
    }
    Ok(total.map(|v| 0.5 * v))
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn junction_angles(pair_points: &[Vec<Point>], t0: Point, eps: f64) -> Result<[f64; 3]> {
    let (r_in, r_out) = (2.0 * eps, 6.0 * eps);
    let mut curves = Vec::with_capacity(3);
    let mut means = Vec::with_capacity(3);
    for (pts, &(a, b, _)) in pair_points.iter().zip(&PAIRS) {
        let local: Vec<Point> = pts
            .iter()
            .copied()
            .filter(|p| {
                let d = (p[0] - t0[0]).hypot(p[1] - t0[1]);
                d > r_in && d < r_out
            })
            .collect();
        let curve = Curve::fit(&local).ok_or_else(|| Error::ContourNotFound(format!("interface {}-{} near junction", a + 1, b + 1)))?;
        let n = local.len() as f64;
        means.push([local.iter().map(|p| p[0]).sum::<f64>() / n, local.iter().map(|p| p[1]).sum::<f64>() / n]);
        curves.push(curve);
    }
    // junction: centroid of the closest points, refined twice
    let mut t = t0;
    for _ in 0..3 {
        let q: Vec<Point> = curves.iter().map(|c| c.closest_point(t)).collect();
        t = [(q[0][0] + q[1][0] + q[2][0]) / 3.0, (q[0][1] + q[1][1] + q[2][1]) / 3.0];
    }
    let rays: Vec<f64> = curves
        .iter()
        .zip(&means)
        .map(|(c, m)| {
            let p = c.closest_point(t);
            let mut d = c.tangent(p);
            if d[0] * (m[0] - t[0]) + d[1] * (m[1] - t[1]) < 0.0 {
                d = [-d[0], -d[1]];
            }
            d[1].atan2(d[0])
        })
        .collect();
    let tau = std::f64::consts::TAU;
    // sector between rays r and s that avoids ray o
    let sector = |r: f64, s: f64, o: f64| {
        let d = (s - r).rem_euclid(tau);
        if (o - r).rem_euclid(tau) < d {
            tau - d
        } else {
            d
        }
    };
    let (r12, r13, r23) = (rays[0], rays[1], rays[2]);
    Ok([
        sector(r12, r13, r23).to_degrees(),
        sector(r12, r23, r13).to_degrees(),
        sector(r13, r23, r12).to_degrees(),
    ])
}

/// Free plus wall energy of the snapshot per unit length in `y`: the excess
/// energy of an interface normal to `x`.
pub fn interface_energy(snap: &Snapshot) -> Result<f64> {
    let m = snap.material()?;
    let c = snap.phases()?;
    let e = energy::free_energy(&snap.grid, &c, &m) + wetting::wall_energy_integral(&snap.grid, &c, &m);
    Ok(e / snap.grid.ly())
}
