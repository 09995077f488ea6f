//! Conjugate-gradient iteration for the symmetric positive (semi-)definite
//! systems that appear in the time stepper.

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Stop when `||b - A x|| <= tol * ||b||`.
    pub tol: f64,
    pub max_iter: usize,
    /// Operator has constants in its null space; the right-hand side and
    /// residual are kept mean-free and the solution is returned mean-free.
    pub singular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(x: &mut [f64]) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}

/// Preconditioned CG for `A x = b` starting from the value in `x`.
///
/// `precond`, when given, applies an SPD approximation of `A^{-1}`. The
/// stopping test uses the unpreconditioned residual.
pub fn conjugate_gradient<A, P>(mut apply: A, mut precond: Option<P>, b: &[f64], x: &mut [f64], opts: CgOptions) -> CgReport
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut rhs = b.to_vec();
    if opts.singular {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let b_norm = dot(&rhs, &rhs).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgReport {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }

    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if opts.singular {
        remove_mean(&mut r);
    }

    let mut z = vec![0.0; n];
    let mut apply_precond = |v: &[f64], out: &mut [f64]| {
        match precond.as_mut() {
            Some(m) => m(v, out),
            None => out.copy_from_slice(v),
        }
        if opts.singular {
            remove_mean(out);
        }
    };

    let mut rel = dot(&r, &r).sqrt() / b_norm;
    if rel <= opts.tol {
        return CgReport {
            iterations: 0,
            relative_residual: rel,
            converged: true,
        };
    }

    apply_precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for it in 1..=opts.max_iter {
        apply(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return CgReport {
                iterations: it,
                relative_residual: rel,
                converged: false,
            };
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if opts.singular {
            remove_mean(&mut r);
        }
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= opts.tol {
            if opts.singular {
                remove_mean(x);
            }
            return CgReport {
                iterations: it,
                relative_residual: rel,
                converged: true,
            };
        }
        apply_precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if opts.singular {
        remove_mean(x);
    }
    CgReport {
        iterations: opts.max_iter,
        relative_residual: rel,
        converged: false,
    }
}

/// Unpreconditioned CG.
pub fn cg<A>(apply: A, b: &[f64], x: &mut [f64], opts: CgOptions) -> CgReport
where
    A: FnMut(&[f64], &mut [f64]),
{
    conjugate_gradient(apply, None::<fn(&[f64], &mut [f64])>, b, x, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{AxisBc, FlatLaplacian};

    fn opts(tol: f64) -> CgOptions {
        CgOptions {
            tol,
            max_iter: 500,
            singular: false,
        }
    }

    #[test]
    fn solves_dense_spd() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let b = [1.0, 2.0, 3.0];
        let mut x = [0.0; 3];
        let rep = cg(
            |v, out| {
                for i in 0..3 {
                    out[i] = (0..3).map(|j| a[i][j] * v[j]).sum();
                }
            },
            &b,
            &mut x,
            opts(1e-14),
        );
        assert!(rep.converged);
        for i in 0..3 {
            let ax: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_poisson_recovers_mean_free_solution() {
        let lap = FlatLaplacian {
            mx: 16,
            my: 12,
            hx: 0.1,
            hy: 0.2,
            bx: AxisBc::Periodic,
            by: AxisBc::Neumann,
        };
        let exact: Vec<f64> = (0..lap.len()).map(|k| ((k * 37 % 11) as f64).sin()).collect();
        let mut exact0 = exact.clone();
        remove_mean(&mut exact0);
        let mut b = vec![0.0; lap.len()];
        lap.apply(&exact0, &mut b);
        b.iter_mut().for_each(|v| *v = -*v);
        let mut x = vec![0.0; lap.len()];
        let rep = cg(
            |v, out| {
                lap.apply(v, out);
                out.iter_mut().for_each(|o| *o = -*o);
            },
            &b,
            &mut x,
            CgOptions {
                tol: 1e-12,
                max_iter: 2000,
                singular: true,
            },
        );
        assert!(rep.converged, "{rep:?}");
        for (a, e) in x.iter().zip(&exact0) {
            assert!((a - e).abs() < 1e-8);
        }
    }

    #[test]
    fn diagonal_preconditioner_speeds_up_and_agrees() {
        // badly scaled tridiagonal SPD matrix
        let n = 40;
        let d: Vec<f64> = (0..n).map(|i| 3.0 * 10f64.powi((i % 5) as i32)).collect();
        let a_apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                out[i] = d[i] * v[i] - l - r;
            }
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut x0 = vec![0.0; n];
        let plain = cg(a_apply, &b, &mut x0, opts(1e-13));
        let mut x1 = vec![0.0; n];
        let pre = conjugate_gradient(
            a_apply,
            Some(|v: &[f64], o: &mut [f64]| {
                for i in 0..n {
                    o[i] = v[i] / d[i];
                }
            }),
            &b,
            &mut x1,
            opts(1e-13),
        );
        assert!(plain.converged && pre.converged);
        assert!(pre.iterations < plain.iterations, "{pre:?} {plain:?}");
        for i in 0..n {
            assert!((x0[i] - x1[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn exact_preconditioner_converges_in_one_step() {
        let b = [1.0, -2.0, 0.5];
        let diag = [2.0, 5.0, 0.25];
        let mut x = [0.0; 3];
        let rep = conjugate_gradient(
            |v: &[f64], o: &mut [f64]| (0..3).for_each(|i| o[i] = diag[i] * v[i]),
            Some(|v: &[f64], o: &mut [f64]| (0..3).for_each(|i| o[i] = v[i] / diag[i])),
            &b,
            &mut x,
            opts(1e-14),
        );
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn reports_non_convergence() {
        let b = vec![1.0; 50];
        let mut x = vec![0.0; 50];
        let lap = FlatLaplacian {
            mx: 50,
            my: 1,
            hx: 1.0,
            hy: 1.0,
            bx: AxisBc::DirichletNode,
            by: AxisBc::Neumann,
        };
        let rep = cg(
            |v, out| {
                lap.apply(v, out);
                out.iter_mut().for_each(|o| *o = -*o);
            },
            &b,
            &mut x,
            CgOptions {
                tol: 1e-14,
                max_iter: 3,
                singular: false,
            },
        );
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }
}
