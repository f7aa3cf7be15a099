//! Stationary iterations: Jacobi, Gauss-Seidel and SOR. Gauss-Seidel is the
//! omega = 1 case of the SOR sweep, so the two produce bitwise identical
//! iterates there.

use super::{SolveReport, SolverConfig, StationaryKind};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Vect};

pub(super) fn solve(
    a: &Mat,
    b: &Vect,
    cfg: &SolverConfig,
    kind: StationaryKind,
    omega: f64,
) -> Result<SolveReport> {
    let n = a.rows();
    for i in 0..n {
        if a[(i, i)] == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
    }
    let max_iter = cfg.resolved_max_iter(n);
    let bnorm = b.norm2().max(f64::MIN_POSITIVE);
    let mut x = Vect::zeros(n);
    let mut history = vec![b.norm2()];
    let mut converged = history[0] / bnorm <= cfg.tol;

    for _ in 0..max_iter {
        if converged {
            break;
        }
        match kind {
            StationaryKind::Jacobi => {
                let mut next = Vect::zeros(n);
                for i in 0..n {
                    let mut s = b[i];
                    for j in 0..n {
                        if j != i {
                            s -= a[(i, j)] * x[j];
                        }
                    }
                    next[i] = s / a[(i, i)];
                }
                x = next;
            }
            StationaryKind::GaussSeidel | StationaryKind::Sor => {
                // in-place sweep using the most recent updates
                for i in 0..n {
                    let mut s = b[i];
                    for j in 0..n {
                        if j != i {
                            s -= a[(i, j)] * x[j];
                        }
                    }
                    let gs = s / a[(i, i)];
                    x[i] = (1.0 - omega) * x[i] + omega * gs;
                }
            }
        }
        let r = b.sub(&a.matvec(&x)).norm2();
        history.push(r);
        if !r.is_finite() {
            break;
        }
        converged = r / bnorm <= cfg.tol;
    }

    Ok(SolveReport {
        w: x.data().to_vec(),
        n_end: history.len() - 1,
        converged,
        breakdown: None,
        residual_history: history,
    })
}
