//! Gradient descent on f(w) = ||Aw - b||^2 with gradient 2 A^T (Aw - b).
//! The Auto step is 1/L with L = 2 sigma_max(A)^2.

use super::{gd_smoothness, SolveReport, SolverConfig, StepSize};
use crate::error::Result;
use crate::linalg::{Mat, Vect};

pub(super) fn solve(a: &Mat, b: &Vect, cfg: &SolverConfig) -> Result<SolveReport> {
    let n = a.cols();
    let max_iter = cfg.resolved_max_iter(a.rows());
    let bnorm = b.norm2().max(f64::MIN_POSITIVE);
    let step = match cfg.step_size {
        StepSize::Fixed(s) => s,
        StepSize::Auto => 1.0 / gd_smoothness(a).max(f64::MIN_POSITIVE),
    };

    let mut w = Vect::zeros(n);
    let mut history = vec![b.norm2()];
    let mut converged = history[0] / bnorm <= cfg.tol;
    let mut breakdown = None;

    for _ in 0..max_iter {
        if converged {
            break;
        }
        let resid = a.matvec(&w).sub(b);
        let grad = a.tr_matvec(&resid).scale(2.0);
        w.axpy(-step, &grad);
        let r = b.sub(&a.matvec(&w)).norm2();
        history.push(r);
        if !r.is_finite() {
            breakdown = Some("gd diverged (non-finite residual)".into());
            break;
        }
        converged = r / bnorm <= cfg.tol;
    }

    Ok(SolveReport {
        w: w.data().to_vec(),
        n_end: history.len() - 1,
        converged,
        breakdown,
        residual_history: history,
    })
}
