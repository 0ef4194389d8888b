//! Matrix-free MINRES (Paige & Saunders) for self-adjoint operators that may
//! be singular, in a caller-defined inner product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&mut self, x: &[f64], y: &mut [f64]);

    /// Inner product in which the operator is self-adjoint.
    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinresOptions {
    /// Relative residual `|b - A x| / |b|` to reach.
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual at exit, recomputed from `b - A x`.
    pub residual: f64,
    pub converged: bool,
}

impl SolveReport {
    /// Combine reports of consecutive solves.
    pub fn merge(self, other: SolveReport) -> SolveReport {
        SolveReport {
            iterations: self.iterations + other.iterations,
            residual: self.residual.max(other.residual),
            converged: self.converged && other.converged,
        }
    }

    pub fn trivial() -> SolveReport {
        SolveReport {
            iterations: 0,
            residual: 0.0,
            converged: true,
        }
    }
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solve `A x = b` from `x0 = 0`. Non-convergence is reported, not an error;
/// a non-finite recurrence value is.
pub fn minres<A: LinearOperator>(op: &mut A, b: &[f64], opts: MinresOptions) -> Result<(Vec<f64>, SolveReport)> {
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side length");
    let mut x = vec![0.0; n];

    let beta1 = op.dot(b, b).sqrt();
    if !beta1.is_finite() {
        return Err(Error::NonFinite { iterations: 0 });
    }
    if beta1 == 0.0 {
        return Ok((x, SolveReport::trivial()));
    }

    let true_residual = |op: &mut A, x: &[f64], scratch: &mut Vec<f64>| -> f64 {
        op.apply(x, scratch);
        for (s, bi) in scratch.iter_mut().zip(b) {
            *s = bi - *s;
        }
        op.dot(scratch, scratch).sqrt() / beta1
    };

    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = b.to_vec();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];

    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;

    // stopping threshold on the recurrence estimate; tightened if the true
    // residual disagrees
    let mut target = opts.tol;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        op.apply(&v, &mut y);
        if iterations >= 2 {
            axpy(-beta / oldb, &r1, &mut y);
        }
        let alfa = op.dot(&v, &y);
        axpy(-alfa / beta, &r2, &mut y);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = op.dot(&r2, &y).max(0.0).sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        if !(alfa.is_finite() && beta.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite { iterations });
        }

        let denom = 1.0 / gamma;
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for k in 0..n {
            w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) * denom;
            x[k] += phi * w[k];
        }

        let estimate = phibar / beta1;
        // beta == 0: the Krylov space is invariant, x is exact
        if estimate <= target || beta == 0.0 {
            let rel = true_residual(op, &x, &mut y);
            if rel <= opts.tol {
                return Ok((
                    x,
                    SolveReport {
                        iterations,
                        residual: rel,
                        converged: true,
                    },
                ));
            }
            if beta == 0.0 {
                break;
            }
            target = estimate * (opts.tol / rel) * 0.9;
            // y was used as scratch; rebuild it from r2
            y.copy_from_slice(&r2);
        }
    }

    let rel = true_residual(op, &x, &mut y);
    Ok((
        x,
        SolveReport {
            iterations,
            residual: rel,
            converged: rel <= opts.tol,
        },
    ))
}
