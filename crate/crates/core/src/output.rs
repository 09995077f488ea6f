//! Legacy ASCII VTK snapshots and the run manifest.
//!
//! Fluid snapshots are structured points with cell data: `c1`, `c2`, `c3`,
//! `pressure` and the cell-centred `velocity`. The title line carries the
//! step, time, boundary types and material parameters as `key=value` pairs
//! so that a snapshot can be post-processed on its own. Numbers use the
//! shortest representation that reads back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::energy::PhaseTriple;
use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, ScalarField, Side};
use crate::material::{Material, MaterialParams};
use crate::solid::SolidState;
use crate::stepper::FluidState;

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Wall => "wall",
    }
}

pub fn snapshot_name(step: usize) -> String {
    format!("fields_{step}.vtk")
}

fn title(state: &FluidState, step: usize) -> String {
    let p = state.material.params();
    let g = &state.grid;
    let mut t = format!(
        "tricap step={step} t={:e} xb={} yb={} eps={:e} g12={:e} g13={:e} g23={:e} M={:e} rho={:e} eta={:e}",
        state.time,
        boundary_name(g.x_boundary),
        boundary_name(g.y_boundary),
        p.epsilon,
        p.gamma12,
        p.gamma13,
        p.gamma23,
        p.mobility,
        p.rho,
        p.eta
    );
    for side in g.wall_sides() {
        let w = p.walls.side(side).gamma_s;
        if w != [0.0; 3] {
            let _ = write!(t, " ws_{}={:e},{:e},{:e}", side.name(), w[0], w[1], w[2]);
        }
    }
    t
}

fn push_scalars(out: &mut String, name: &str, values: impl Iterator<Item = f64>) {
    let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
    for v in values {
        let _ = writeln!(out, "{v:e}");
    }
}

pub fn fluid_snapshot_text(state: &FluidState, step: usize) -> String {
    let g = &state.grid;
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET STRUCTURED_POINTS", title(state, step));
    let _ = writeln!(out, "DIMENSIONS {} {} 1\nORIGIN 0 0 0\nSPACING {:e} {:e} 1", g.nx + 1, g.ny + 1, g.hx, g.hy);
    let _ = writeln!(out, "CELL_DATA {}", g.cells());
    for (p, c) in state.c.c.iter().enumerate() {
        push_scalars(&mut out, &format!("c{}", p + 1), c.interior_iter());
    }
    push_scalars(&mut out, "pressure", state.p.interior_iter());
    let (u, v) = state.v.cell_centred(g);
    let _ = writeln!(out, "VECTORS velocity double");
    for (a, b) in u.interior_iter().zip(v.interior_iter()) {
        let _ = writeln!(out, "{a:e} {b:e} 0");
    }
    out
}

pub fn write_fluid_snapshot(dir: &Path, state: &FluidState, step: usize) -> Result<()> {
    fs::write(dir.join(snapshot_name(step)), fluid_snapshot_text(state, step))?;
    Ok(())
}

/// Solid snapshot: node-centred displacement and velocity on the reference
/// mesh.
pub fn write_solid_snapshot(dir: &Path, state: &SolidState, step: usize) -> Result<()> {
    let m = &state.mesh;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# vtk DataFile Version 3.0\ntricap solid step={step} t={:e} mu={:e} lambda={:e} rho0={:e}\nASCII\nDATASET STRUCTURED_POINTS",
        state.time, state.material.mu, state.material.lambda, state.material.rho0
    );
    let _ = writeln!(out, "DIMENSIONS {} {} 1\nORIGIN 0 0 0\nSPACING {:e} {:e} 1", m.nx + 1, m.ny + 1, m.hx(), m.hy());
    let _ = writeln!(out, "POINT_DATA {}", m.nodes());
    for (name, data) in [("displacement", &state.u), ("velocity", &state.udot)] {
        let _ = writeln!(out, "VECTORS {name} double");
        for v in data.iter() {
            let _ = writeln!(out, "{:e} {:e} 0", v[0], v[1]);
        }
    }
    fs::write(dir.join(snapshot_name(step)), out)?;
    Ok(())
}

/// A fluid snapshot read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub grid: Grid,
    pub params: MaterialParams,
    /// Row-major cell values.
    pub c: [Vec<f64>; 3],
    pub pressure: Vec<f64>,
    pub velocity: Vec<[f64; 2]>,
}

impl Snapshot {
    pub fn material(&self) -> Result<Material> {
        self.params.validate()
    }

    /// Phase fields with synchronised ghosts.
    pub fn phases(&self) -> Result<PhaseTriple> {
        let m = self.material()?;
        let f = |p: usize| ScalarField::from_interior(&self.grid, &self.c[p]);
        let mut c = PhaseTriple::new(f(0), f(1), f(2));
        c.sync(&self.grid, &m);
        Ok(c)
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path)?;
    parse_snapshot(&text)
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 4 || !lines[0].starts_with("# vtk DataFile") {
        return Err(bad(1, "not a legacy VTK file"));
    }
    let mut kv = std::collections::HashMap::new();
    for tok in lines[1].split_whitespace().skip(1) {
        if let Some((k, v)) = tok.split_once('=') {
            kv.insert(k, v);
        }
    }
    if lines[1].split_whitespace().nth(1) == Some("solid") {
        return Err(bad(2, "solid snapshots carry no phase fields"));
    }
    let num = |k: &str| -> Result<f64> {
        kv.get(k)
            .ok_or_else(|| bad(2, format!("title lacks `{k}`")))?
            .parse::<f64>()
            .map_err(|e| bad(2, format!("`{k}`: {e}")))
    };
    let bnd = |k: &str| -> Result<Boundary> {
        match kv.get(k).copied() {
            Some("periodic") => Ok(Boundary::Periodic),
            Some("wall") => Ok(Boundary::Wall),
            _ => Err(bad(2, format!("title lacks boundary `{k}`"))),
        }
    };
    let mut params = MaterialParams {
        gamma12: num("g12")?,
        gamma13: num("g13")?,
        gamma23: num("g23")?,
        epsilon: num("eps")?,
        mobility: num("M")?,
        rho: num("rho")?,
        eta: num("eta")?,
        ..Default::default()
    };
    for side in Side::ALL {
        if let Some(v) = kv.get(format!("ws_{}", side.name()).as_str()) {
            let vals: Vec<f64> = v.split(',').filter_map(|x| x.parse().ok()).collect();
            if vals.len() != 3 {
                return Err(bad(2, format!("bad wall energies for {}", side.name())));
            }
            params.walls.side_mut(side).gamma_s = [vals[0], vals[1], vals[2]];
        }
    }
    let step = num("step")? as usize;
    let time = num("t")?;

    let mut dims = None;
    let mut spacing = None;
    let mut scalars: std::collections::HashMap<String, Vec<f64>> = Default::default();
    let mut velocity = Vec::new();
    let mut cells = 0usize;
    let mut i = 2;
    let numbers = |line: &str, n: usize, ln: usize| -> Result<Vec<f64>> {
        let v: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let v = v.map_err(|e| bad(ln, e.to_string()))?;
        if v.len() != n {
            return Err(bad(ln, format!("expected {n} numbers")));
        }
        Ok(v)
    };
    while i < lines.len() {
        let line = lines[i].trim();
        let mut words = line.split_whitespace();
        match words.next() {
            Some("DIMENSIONS") => {
                let v = numbers(&line[10..], 3, i + 1)?;
                dims = Some((v[0] as usize, v[1] as usize));
            }
            Some("SPACING") => {
                let v = numbers(&line[7..], 3, i + 1)?;
                spacing = Some((v[0], v[1]));
            }
            Some("CELL_DATA") => {
                cells = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| bad(i + 1, "bad CELL_DATA"))?;
            }
            Some("SCALARS") => {
                let name = words.next().ok_or_else(|| bad(i + 1, "unnamed scalars"))?.to_string();
                i += 2; // LOOKUP_TABLE
                let mut vals = Vec::with_capacity(cells);
                for k in 0..cells {
                    let ln = i + k;
                    let l = lines.get(ln).ok_or_else(|| bad(ln + 1, "truncated scalars"))?;
                    vals.push(l.trim().parse::<f64>().map_err(|e| bad(ln + 1, e.to_string()))?);
                }
                i += cells;
                scalars.insert(name, vals);
                continue;
            }
            Some("VECTORS") => {
                i += 1;
                for k in 0..cells {
                    let ln = i + k;
                    let l = lines.get(ln).ok_or_else(|| bad(ln + 1, "truncated vectors"))?;
                    let v = numbers(l, 3, ln + 1)?;
                    velocity.push([v[0], v[1]]);
                }
                i += cells;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    let (dx, dy) = dims.ok_or_else(|| bad(0, "missing DIMENSIONS"))?;
    let (hx, hy) = spacing.ok_or_else(|| bad(0, "missing SPACING"))?;
    let (nx, ny) = (dx - 1, dy - 1);
    let grid = Grid::new(nx, ny, hx * nx as f64, hy * ny as f64, bnd("xb")?, bnd("yb")?)?;
    let mut take = |name: &str| scalars.remove(name).ok_or_else(|| bad(0, format!("missing field `{name}`")));
    let c = [take("c1")?, take("c2")?, take("c3")?];
    let pressure = take("pressure").unwrap_or_else(|_| vec![0.0; nx * ny]);
    if c.iter().any(|f| f.len() != nx * ny) {
        return Err(bad(0, "field size does not match the grid"));
    }
    Ok(Snapshot {
        step,
        time,
        grid,
        params,
        c,
        pressure,
        velocity,
    })
}

/// Plain-text `key = value` run summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Manifest {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Manifest { entries }
    }
}

pub const MANIFEST_NAME: &str = "run_manifest.txt";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FaceField;
    use crate::wetting::{WallEnergyModel, WallSides};

    #[test]
    fn snapshot_round_trip() {
        let grid = Grid::new(6, 5, 1.2, 1.0, Boundary::Periodic, Boundary::Wall).unwrap();
        let mut params = MaterialParams {
            epsilon: 0.07,
            gamma13: 1.3,
            ..Default::default()
        };
        params.walls = WallSides::uniform(WallEnergyModel::new([0.1, -0.2, 0.3]));
        let m = params.validate().unwrap();
        let c1 = ScalarField::from_fn(&grid, |x, y| 0.3 + 0.1 * (x * 7.0 + y).sin());
        let c2 = ScalarField::from_fn(&grid, |x, _| 0.2 + 0.05 * x);
        let v = FaceField::from_fn(&grid, |x, _| x.cos() / 3.0, |_, y| y * 0.1);
        let mut s = FluidState::new(grid, m, PhaseTriple::from_two(&grid, c1, c2), v);
        s.time = 0.123456789;
        let text = fluid_snapshot_text(&s, 42);
        let back = parse_snapshot(&text).unwrap();
        assert_eq!(back.step, 42);
        assert_eq!(back.time, s.time);
        assert_eq!(back.grid.nx, 6);
        assert_eq!(back.grid.y_boundary, Boundary::Wall);
        let mut expect = params;
        expect.walls.left = WallEnergyModel::default();
        expect.walls.right = WallEnergyModel::default();
        assert_eq!(back.params, expect);
        for p in 0..3 {
            assert_eq!(back.c[p], s.c.c[p].interior());
        }
        assert_eq!(back.velocity.len(), 30);
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert_eq!(parse_snapshot("hello\n").unwrap_err().code(), "ParseError");
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::default();
        m.push("scenario", "lens");
        m.push("steps", 10);
        let back = Manifest::parse(&m.text());
        assert_eq!(back, m);
        assert_eq!(back.get("steps"), Some("10"));
    }
}
