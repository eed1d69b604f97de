use super::{dot, norm, Preconditioner, SolveReport, SolverSettings};
use crate::assembly::CsrMatrix;

fn inverse_diagonal(a: &CsrMatrix, pc: Preconditioner) -> Vec<f64> {
    match pc {
        Preconditioner::None => vec![1.0; a.nrows()],
        Preconditioner::Jacobi => a
            .diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect(),
    }
}

fn start(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
    let x = x0.map_or_else(|| vec![0.0; b.len()], <[f64]>::to_vec);
    let ax = a.mul_vec(&x);
    let r = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    (x, r)
}

fn target(bnorm: f64, s: &SolverSettings) -> f64 {
    (s.rel_tol * bnorm).max(s.abs_tol)
}

fn report(iterations: usize, rnorm: f64, bnorm: f64, converged: bool) -> SolveReport {
    SolveReport {
        iterations,
        residual: if bnorm > 0.0 { rnorm / bnorm } else { rnorm },
        converged,
    }
}

/// Preconditioned conjugate gradients for symmetric positive (semi)definite
/// systems.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], settings: &SolverSettings) -> (Vec<f64>, SolveReport) {
    solve_spd_from(a, b, None, settings)
}

pub fn solve_spd_from(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    settings: &SolverSettings,
) -> (Vec<f64>, SolveReport) {
    assert_eq!(a.nrows(), b.len(), "right-hand side length");
    let bnorm = norm(b);
    let tol = target(bnorm, settings);
    let (mut x, mut r) = start(a, b, x0);
    let mut rnorm = norm(&r);
    if rnorm <= tol {
        return (x, report(0, rnorm, bnorm, true));
    }
    let dinv = inverse_diagonal(a, settings.preconditioner);
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; b.len()];
    let max_iter = settings.max_iter_for(b.len());
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return (x, report(it, rnorm, bnorm, false));
        }
        let alpha = rz / pap;
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = norm(&r);
        if rnorm <= tol {
            return (x, report(it, rnorm, bnorm, true));
        }
        for i in 0..z.len() {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    (x, report(max_iter, rnorm, bnorm, false))
}

/// Right-preconditioned BiCGStab for general square systems.
pub fn solve_nonsym(a: &CsrMatrix, b: &[f64], settings: &SolverSettings) -> (Vec<f64>, SolveReport) {
    solve_nonsym_from(a, b, None, settings)
}

pub fn solve_nonsym_from(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    settings: &SolverSettings,
) -> (Vec<f64>, SolveReport) {
    assert_eq!(a.nrows(), b.len(), "right-hand side length");
    let n = b.len();
    let bnorm = norm(b);
    let tol = target(bnorm, settings);
    let (mut x, mut r) = start(a, b, x0);
    let mut rnorm = norm(&r);
    if rnorm <= tol {
        return (x, report(0, rnorm, bnorm, true));
    }
    let dinv = inverse_diagonal(a, settings.preconditioner);
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    let max_iter = settings.max_iter_for(n);
    let mut restarts = 0;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let rho_new = dot(&r_hat, &r);
        let breakdown = rho_new == 0.0 || !rho_new.is_finite();
        let rv = if breakdown {
            0.0
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                y[i] = p[i] * dinv[i];
            }
            a.mul_vec_into(&y, &mut v);
            dot(&r_hat, &v)
        };
        if rv == 0.0 || !rv.is_finite() {
            // restart from the true residual with a fresh shadow vector
            a.mul_vec_into(&x, &mut t);
            for i in 0..n {
                r[i] = b[i] - t[i];
            }
            rnorm = norm(&r);
            if rnorm <= tol {
                return (x, report(it, rnorm, bnorm, true));
            }
            restarts += 1;
            if restarts > 5 || !rnorm.is_finite() {
                return (x, report(it, rnorm, bnorm, false));
            }
            r_hat.copy_from_slice(&r);
            (rho, alpha, omega) = (1.0, 1.0, 1.0);
            v.fill(0.0);
            p.fill(0.0);
            continue;
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        let snorm = norm(&s);
        if snorm <= tol {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return (x, report(it, snorm, bnorm, true));
        }
        for i in 0..n {
            z[i] = s[i] * dinv[i];
        }
        a.mul_vec_into(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        rnorm = norm(&r);
        if rnorm <= tol {
            return (x, report(it, rnorm, bnorm, true));
        }
        if !rnorm.is_finite() {
            return (x, report(it, rnorm, bnorm, false));
        }
        if omega == 0.0 {
            // stagnation: force a restart on the next pass
            rho = 0.0;
            r_hat.fill(0.0);
        }
    }
    (x, report(max_iter, rnorm, bnorm, false))
}
