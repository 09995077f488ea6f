//! Exact eigenbasis of the five-point Laplacian on a tensor-product grid.
//!
//! Every [`AxisBc`] has a closed-form orthonormal eigenbasis (real Fourier,
//! DCT-II, DST-II or DST-I), so `f(L) x` for any scalar function `f` costs
//! two separable dense transforms. The solvers use it as a preconditioner.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use crate::grid::{AxisBc, FlatLaplacian};

/// Orthonormal eigenvectors `q[k * n + i]` and eigenvalues of the 1D
/// second-difference operator on one axis.
#[derive(Debug, Clone)]
struct AxisBasis {
    n: usize,
    q: Vec<f64>,
    /// `qt[i * n + k] = q[k * n + i]`
    qt: Vec<f64>,
    lambda: Vec<f64>,
}

impl AxisBasis {
    fn new(n: usize, h: f64, bc: AxisBc) -> Self {
        let nf = n as f64;
        let s2 = |theta: f64| -4.0 / (h * h) * theta.sin().powi(2);
        let mut q = vec![0.0; n * n];
        let mut lambda = vec![0.0; n];
        for k in 0..n {
            let kf = k as f64;
            let row = &mut q[k * n..(k + 1) * n];
            match bc {
                AxisBc::Periodic => {
                    // k -> wavenumber m, cosine for k odd or zero, sine for even
                    let m = k.div_ceil(2);
                    let mf = m as f64;
                    lambda[k] = s2(PI * mf / nf);
                    let nyquist = n.is_multiple_of(2) && m == n / 2;
                    for (i, v) in row.iter_mut().enumerate() {
                        let a = 2.0 * PI * mf * i as f64 / nf;
                        *v = if m == 0 || nyquist {
                            a.cos() / nf.sqrt()
                        } else if k % 2 == 1 {
                            (2.0 / nf).sqrt() * a.cos()
                        } else {
                            (2.0 / nf).sqrt() * a.sin()
                        };
                    }
                }
                AxisBc::Neumann => {
                    lambda[k] = s2(PI * kf / (2.0 * nf));
                    let c = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
                    for (i, v) in row.iter_mut().enumerate() {
                        *v = c * (PI * kf * (i as f64 + 0.5) / nf).cos();
                    }
                }
                AxisBc::DirichletMirror => {
                    let m = kf + 1.0;
                    lambda[k] = s2(PI * m / (2.0 * nf));
                    let c = if k + 1 == n { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
                    for (i, v) in row.iter_mut().enumerate() {
                        *v = c * (PI * m * (i as f64 + 0.5) / nf).sin();
                    }
                }
                AxisBc::DirichletNode => {
                    let m = kf + 1.0;
                    lambda[k] = s2(PI * m / (2.0 * (nf + 1.0)));
                    let c = (2.0 / (nf + 1.0)).sqrt();
                    for (i, v) in row.iter_mut().enumerate() {
                        *v = c * (PI * m * (i as f64 + 1.0) / (nf + 1.0)).sin();
                    }
                }
            }
        }
        let mut qt = vec![0.0; n * n];
        for k in 0..n {
            for i in 0..n {
                qt[i * n + k] = q[k * n + i];
            }
        }
        AxisBasis { n, q, qt, lambda }
    }

    /// Coefficients along this axis of each of `rows` contiguous rows.
    fn forward_rows(&self, x: &[f64], out: &mut [f64], rows: usize) {
        let n = self.n;
        out[..rows * n].iter_mut().for_each(|v| *v = 0.0);
        for j in 0..rows {
            let dst = &mut out[j * n..(j + 1) * n];
            for i in 0..n {
                let xi = x[j * n + i];
                for (d, q) in dst.iter_mut().zip(&self.qt[i * n..(i + 1) * n]) {
                    *d += xi * q;
                }
            }
        }
    }

    fn inverse_rows(&self, c: &[f64], out: &mut [f64], rows: usize) {
        let n = self.n;
        out[..rows * n].iter_mut().for_each(|v| *v = 0.0);
        for j in 0..rows {
            let dst = &mut out[j * n..(j + 1) * n];
            for k in 0..n {
                let t = c[j * n + k];
                for (d, q) in dst.iter_mut().zip(&self.q[k * n..(k + 1) * n]) {
                    *d += t * q;
                }
            }
        }
    }
}

type BasisKey = (usize, u64, AxisBc);

thread_local! {
    static BASES: RefCell<HashMap<BasisKey, Rc<AxisBasis>>> = RefCell::new(HashMap::new());
    static LAST_LINES: RefCell<Option<(LineKey, Rc<LineSolver>)>> = const { RefCell::new(None) };
}

/// Memoised per thread; bases depend only on size, spacing and boundary.
fn axis_basis(n: usize, h: f64, bc: AxisBc) -> Rc<AxisBasis> {
    BASES.with(|b| {
        let mut map = b.borrow_mut();
        if map.len() > 64 {
            map.clear();
        }
        map.entry((n, h.to_bits(), bc))
            .or_insert_with(|| Rc::new(AxisBasis::new(n, h, bc)))
            .clone()
    })
}

#[derive(Debug, Clone)]
pub struct SpectralLaplacian {
    x: Rc<AxisBasis>,
    y: Rc<AxisBasis>,
    eig: Vec<f64>,
}

impl SpectralLaplacian {
    pub fn new(lap: &FlatLaplacian) -> Self {
        let x = axis_basis(lap.mx, lap.hx, lap.bx);
        let y = axis_basis(lap.my, lap.hy, lap.by);
        let mut eig = Vec::with_capacity(lap.mx * lap.my);
        for ly in &y.lambda {
            eig.extend(x.lambda.iter().map(|lx| lx + ly));
        }
        SpectralLaplacian { x, y, eig }
    }

    /// Eigenvalues indexed like the transformed coefficients.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig
    }

    /// `out = Q^T x`, coefficients in the eigenbasis.
    pub fn forward(&self, x: &[f64], out: &mut [f64]) {
        let (mx, my) = (self.x.n, self.y.n);
        let mut tmp = vec![0.0; mx * my];
        self.x.forward_rows(x, &mut tmp, my);
        out.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..my {
            let dst = &mut out[k * mx..(k + 1) * mx];
            for j in 0..my {
                let w = self.y.q[k * my + j];
                for (d, t) in dst.iter_mut().zip(&tmp[j * mx..(j + 1) * mx]) {
                    *d += w * t;
                }
            }
        }
    }

    /// `out = Q c`, inverse of [`forward`](Self::forward).
    pub fn inverse(&self, c: &[f64], out: &mut [f64]) {
        let (mx, my) = (self.x.n, self.y.n);
        let mut tmp = vec![0.0; mx * my];
        for k in 0..my {
            let src = &c[k * mx..(k + 1) * mx];
            for j in 0..my {
                let w = self.y.q[k * my + j];
                for (d, s) in tmp[j * mx..(j + 1) * mx].iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
        self.x.inverse_rows(&tmp, out, my);
    }

    /// `out = f(L) x` with `f` applied to each eigenvalue.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64, x: &[f64], out: &mut [f64]) {
        let mut c = vec![0.0; x.len()];
        self.forward(x, &mut c);
        for (v, &l) in c.iter_mut().zip(&self.eig) {
            *v *= f(l);
        }
        self.inverse(&c, out);
    }
}

/// Symmetric positive definite band matrix in Cholesky form:
/// `l[i * (w + 1) + d] = L[i][i - d]`.
#[derive(Debug, Clone)]
struct BandCholesky {
    n: usize,
    w: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factors the matrix with lower band `a(i, d) = A[i][i - d]`, `d <= w`.
    fn factor(n: usize, w: usize, a: impl Fn(usize, usize) -> f64) -> Option<Self> {
        let s = w + 1;
        let mut l = vec![0.0; n * s];
        for i in 0..n {
            for j in i.saturating_sub(w)..=i {
                let mut sum = a(i, i - j);
                for k in i.saturating_sub(w).max(j.saturating_sub(w))..j {
                    sum -= l[i * s + (i - k)] * l[j * s + (j - k)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return None;
                    }
                    l[i * s] = sum.sqrt();
                } else {
                    l[i * s + (i - j)] = sum / l[j * s];
                }
            }
        }
        Some(BandCholesky { n, w, l })
    }

    fn solve(&self, b: &mut [f64]) {
        let (n, w, s) = (self.n, self.w, self.w + 1);
        for i in 0..n {
            let mut v = b[i];
            for j in i.saturating_sub(w)..i {
                v -= self.l[i * s + (i - j)] * b[j];
            }
            b[i] = v / self.l[i * s];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for k in i + 1..(i + w + 1).min(n) {
                v -= self.l[k * s + (k - i)] * b[k];
            }
            b[i] = v / self.l[i * s];
        }
    }
}

/// Tridiagonal second difference of one non-periodic axis: `(sub, diag)`
/// entries of row `i`.
fn second_difference(bc: AxisBc, n: usize, h: f64, i: usize) -> (f64, f64) {
    let edge = match bc {
        AxisBc::Neumann => 1.0,
        AxisBc::DirichletMirror => -1.0,
        AxisBc::DirichletNode => 0.0,
        AxisBc::Periodic => unreachable!("periodic axes are not banded"),
    };
    let ih2 = 1.0 / (h * h);
    let mut diag = -2.0 * ih2;
    if i == 0 {
        diag += edge * ih2;
    }
    if i + 1 == n {
        diag += edge * ih2;
    }
    (if i > 0 { ih2 } else { 0.0 }, diag)
}

/// Row `i` of a symmetric tridiagonal matrix as offsets `-3..=3`.
fn tridiagonal(diff: &[(f64, f64)], i: usize, off: impl Fn(f64) -> f64, diag: impl Fn(f64) -> f64) -> [f64; 7] {
    let mut row = [0.0; 7];
    row[3] = diag(diff[i].1);
    if i > 0 {
        row[2] = off(diff[i].0);
    }
    if i + 1 < diff.len() {
        row[4] = off(diff[i + 1].0);
    }
    row
}

/// Product of band matrices stored as offsets `-3..=3`; the result must fit
/// the same band.
fn band_mul(a: &[[f64; 7]], b: &[[f64; 7]]) -> Vec<[f64; 7]> {
    let n = a.len() as isize;
    let mut c = vec![[0.0; 7]; a.len()];
    for i in 0..n {
        for da in -3..=3isize {
            let p = i + da;
            let x = a[i as usize][(da + 3) as usize];
            if x == 0.0 || p < 0 || p >= n {
                continue;
            }
            for db in -3..=3isize {
                let d = da + db;
                if d.abs() > 3 {
                    continue;
                }
                c[i as usize][(d + 3) as usize] += x * b[p as usize][(db + 3) as usize];
            }
        }
    }
    c
}

/// Exact inverse of `K - c K L K` with `K = s - kappa L + diag(r)`, where
/// `L` is the grid Laplacian and the weights `r` vary along one axis only.
/// Uses the eigenbasis of the other axis and a banded Cholesky solve per
/// mode along lines.
#[derive(Debug, Clone)]
pub struct LineSolver {
    /// Lines run along y; when false the data is transposed first.
    along_y: bool,
    basis: Rc<AxisBasis>,
    lines: usize,
    factors: Vec<BandCholesky>,
}

impl LineSolver {
    /// `weights` has one entry per cell along the line axis. The line axis
    /// is y unless y is periodic and x is not. Returns `None` when both axes
    /// are periodic or the operator is not positive definite.
    pub fn new(lap: &FlatLaplacian, s: f64, kappa: f64, c: f64, weights: &[f64], along_y: bool) -> Option<Self> {
        let (mb, hb, bb, ml, hl, bl) = if along_y {
            (lap.mx, lap.hx, lap.bx, lap.my, lap.hy, lap.by)
        } else {
            (lap.my, lap.hy, lap.by, lap.mx, lap.hx, lap.bx)
        };
        if bl == AxisBc::Periodic || weights.len() != ml {
            return None;
        }
        let basis = axis_basis(mb, hb, bb);
        let mut factors = Vec::with_capacity(mb);
        let diff: Vec<(f64, f64)> = (0..ml).map(|i| second_difference(bl, ml, hl, i)).collect();
        for &lam in &basis.lambda {
            let l_mode: Vec<[f64; 7]> = (0..ml).map(|i| tridiagonal(&diff, i, |sub| sub, |d| d + lam)).collect();
            let k_mode: Vec<[f64; 7]> = (0..ml)
                .map(|i| tridiagonal(&diff, i, |sub| -kappa * sub, |d| s - kappa * (d + lam) + weights[i]))
                .collect();
            let klk = band_mul(&band_mul(&k_mode, &l_mode), &k_mode);
            let entry = |i: usize, d: usize| k_mode[i][3 - d] - c * klk[i][3 - d];
            factors.push(BandCholesky::factor(ml, 3, entry)?);
        }
        Some(LineSolver {
            along_y,
            basis,
            lines: ml,
            factors,
        })
    }

    /// Like [`new`](Self::new), reusing the previous solver on this thread
    /// when all inputs match.
    pub fn cached(lap: &FlatLaplacian, s: f64, kappa: f64, c: f64, weights: &[f64], along_y: bool) -> Option<Rc<Self>> {
        let key = LineKey {
            lap: *lap,
            coefs: [s, kappa, c],
            weights: weights.to_vec(),
            along_y,
        };
        if let Some(hit) = LAST_LINES.with(|l| l.borrow().as_ref().filter(|(k, _)| *k == key).map(|(_, v)| v.clone())) {
            return Some(hit);
        }
        let solver = Rc::new(LineSolver::new(lap, s, kappa, c, weights, along_y)?);
        LAST_LINES.with(|l| *l.borrow_mut() = Some((key, solver.clone())));
        Some(solver)
    }

    pub fn apply(&self, r: &[f64], out: &mut [f64]) {
        let (mb, ml) = (self.basis.n, self.lines);
        // rows of length mb, one per position along the line
        let rows: Vec<f64> = if self.along_y { r.to_vec() } else { transpose(r, ml, mb) };
        let mut coef = vec![0.0; mb * ml];
        self.basis.forward_rows(&rows, &mut coef, ml);
        let mut line = vec![0.0; ml];
        for (k, f) in self.factors.iter().enumerate() {
            for j in 0..ml {
                line[j] = coef[j * mb + k];
            }
            f.solve(&mut line);
            for j in 0..ml {
                coef[j * mb + k] = line[j];
            }
        }
        if self.along_y {
            self.basis.inverse_rows(&coef, out, ml);
        } else {
            let mut tmp = vec![0.0; mb * ml];
            self.basis.inverse_rows(&coef, &mut tmp, ml);
            out.copy_from_slice(&transpose(&tmp, mb, ml));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct LineKey {
    lap: FlatLaplacian,
    coefs: [f64; 3],
    weights: Vec<f64>,
    along_y: bool,
}

/// Transposes a row-major `rows x cols` array given as `cols`-major input:
/// `x[j * rows + i]` becomes `out[i * cols + j]`.
fn transpose(x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            out[i * cols + j] = x[j * rows + i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [AxisBc; 4] = [AxisBc::Periodic, AxisBc::Neumann, AxisBc::DirichletMirror, AxisBc::DirichletNode];

    fn lap(mx: usize, my: usize, bx: AxisBc, by: AxisBc) -> FlatLaplacian {
        FlatLaplacian {
            mx,
            my,
            hx: 0.7 / mx as f64,
            hy: 0.3 / my as f64,
            bx,
            by,
        }
    }

    #[test]
    fn basis_diagonalises_the_stencil() {
        for (mx, my) in [(6, 5), (7, 4), (1, 3), (8, 8)] {
            for bx in ALL {
                for by in ALL {
                    let l = lap(mx, my, bx, by);
                    let s = SpectralLaplacian::new(&l);
                    let n = mx * my;
                    let mut e = vec![0.0; n];
                    let mut v = vec![0.0; n];
                    let mut lv = vec![0.0; n];
                    for m in 0..n {
                        e.iter_mut().for_each(|x| *x = 0.0);
                        e[m] = 1.0;
                        s.inverse(&e, &mut v);
                        l.apply(&v, &mut lv);
                        let scale = s.eig.iter().fold(1.0f64, |a, b| a.max(b.abs()));
                        for k in 0..n {
                            assert!((lv[k] - s.eig[m] * v[k]).abs() < 1e-11 * scale, "{bx:?} {by:?} {mx}x{my} mode {m}");
                        }
                        let norm: f64 = v.iter().map(|x| x * x).sum();
                        assert!((norm - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn forward_inverts(xs in proptest::collection::vec(-1.0f64..1.0, 35), bx in 0usize..4, by in 0usize..4) {
            let s = SpectralLaplacian::new(&lap(7, 5, ALL[bx], ALL[by]));
            let mut c = vec![0.0; 35];
            let mut back = vec![0.0; 35];
            s.forward(&xs, &mut c);
            s.inverse(&c, &mut back);
            for (a, b) in xs.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn solves_poisson_exactly() {
        let l = lap(16, 12, AxisBc::Periodic, AxisBc::Neumann);
        let s = SpectralLaplacian::new(&l);
        let x: Vec<f64> = (0..192).map(|k| ((k * 7919) % 31) as f64 / 31.0).collect();
        let mean = x.iter().sum::<f64>() / 192.0;
        let x: Vec<f64> = x.iter().map(|v| v - mean).collect();
        let mut b = vec![0.0; 192];
        l.apply(&x, &mut b);
        let mut y = vec![0.0; 192];
        s.apply_fn(|e| if e == 0.0 { 0.0 } else { 1.0 / e }, &b, &mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn band_cholesky_matches_dense_solve() {
        let n = 9;
        let a = |i: usize, d: usize| match d {
            0 => 10.0 + i as f64,
            1 => -1.5,
            2 => 0.5,
            3 => 0.25,
            _ => 0.0,
        };
        let f = BandCholesky::factor(n, 3, a).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
                if hi - lo <= 3 {
                    b[i] += a(hi, hi - lo) * x[j];
                }
            }
        }
        f.solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn line_solver_inverts_operator() {
        for (bx, by, along_y) in [
            (AxisBc::Periodic, AxisBc::Neumann, true),
            (AxisBc::Neumann, AxisBc::Periodic, false),
            (AxisBc::Neumann, AxisBc::Neumann, true),
        ] {
            let l = lap(6, 5, bx, by);
            let (s, kappa, c) = (40.0, 0.02, 1e-4);
            let ml = if along_y { 5 } else { 6 };
            let weights: Vec<f64> = (0..ml).map(|i| if i == 0 || i + 1 == ml { 7.0 } else { 0.0 }).collect();
            let solver = LineSolver::new(&l, s, kappa, c, &weights, along_y).unwrap();
            let k_apply = |x: &[f64], o: &mut [f64]| {
                l.apply(x, o);
                for idx in 0..30 {
                    let (i, j) = (idx % 6, idx / 6);
                    let w = if along_y { weights[j] } else { weights[i] };
                    o[idx] = s * x[idx] - kappa * o[idx] + w * x[idx];
                }
            };
            let x: Vec<f64> = (0..30).map(|k| ((k * 13) % 7) as f64 - 3.0).collect();
            let mut kx = vec![0.0; 30];
            let mut lkx = vec![0.0; 30];
            let mut klkx = vec![0.0; 30];
            k_apply(&x, &mut kx);
            l.apply(&kx, &mut lkx);
            k_apply(&lkx, &mut klkx);
            let b: Vec<f64> = (0..30).map(|k| kx[k] - c * klkx[k]).collect();
            let mut y = vec![0.0; 30];
            solver.apply(&b, &mut y);
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).abs() < 1e-10, "{bx:?} {by:?}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn line_solver_needs_a_bounded_axis() {
        let l = lap(4, 4, AxisBc::Periodic, AxisBc::Periodic);
        assert!(LineSolver::new(&l, 1.0, 1.0, 0.0, &[0.0; 4], true).is_none());
    }
}
