//! Krylov methods: conjugate gradients and GMRES (Arnoldi + Givens), both
//! with optional left ILU(0) preconditioning. Convergence is always judged
//! on the true residual ||b - A x|| so preconditioned and unpreconditioned
//! reports are directly comparable.

use super::{Ilu0, SolveReport, SolverConfig};
use crate::error::Result;
use crate::linalg::{Mat, Vect};

pub(super) fn cg(a: &Mat, b: &Vect, cfg: &SolverConfig, pre: Option<&Ilu0>) -> Result<SolveReport> {
    let sym;
    let a = if cfg.symmetrize_cg {
        sym = a.add(&a.transpose()).scale(0.5);
        &sym
    } else {
        a
    };
    let n = a.rows();
    let max_iter = cfg.resolved_max_iter(n);
    let bnorm = b.norm2().max(f64::MIN_POSITIVE);

    let mut x = Vect::zeros(n);
    let mut r = b.clone();
    let mut history = vec![r.norm2()];
    let mut converged = history[0] / bnorm <= cfg.tol;
    let mut breakdown = None;

    let mut z = match pre {
        Some(m) => m.apply(&r),
        None => r.clone(),
    };
    let mut p = z.clone();
    let mut rz = r.dot(&z);

    for _ in 0..max_iter {
        if converged {
            break;
        }
        let ap = a.matvec(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 || !pap.is_finite() {
            // perturbed matrices may lose positive-definiteness; report,
            // keep the current iterate
            breakdown = Some(format!("cg breakdown: p^T A p = {pap:.3e}"));
            break;
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let true_res = b.sub(&a.matvec(&x)).norm2();
        history.push(true_res);
        if !true_res.is_finite() {
            breakdown = Some("cg residual overflow".into());
            break;
        }
        converged = true_res / bnorm <= cfg.tol;
        if converged {
            break;
        }
        z = match pre {
            Some(m) => m.apply(&r),
            None => r.clone(),
        };
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        let mut p_next = z.clone();
        p_next.axpy(beta, &p);
        p = p_next;
    }

    Ok(SolveReport {
        w: x.data().to_vec(),
        n_end: history.len() - 1,
        converged,
        breakdown,
        residual_history: history,
    })
}

pub(super) fn gmres(
    a: &Mat,
    b: &Vect,
    cfg: &SolverConfig,
    pre: Option<&Ilu0>,
) -> Result<SolveReport> {
    let n = a.rows();
    let max_iter = cfg.resolved_max_iter(n);
    let bnorm = b.norm2().max(f64::MIN_POSITIVE);
    let cycle_len = cfg.restart.unwrap_or(n).max(1);

    let apply = |v: &Vect| -> Vect {
        let av = a.matvec(v);
        match pre {
            Some(m) => m.apply(&av),
            None => av,
        }
    };

    let mut x = Vect::zeros(n);
    let mut history = vec![b.norm2()];
    let mut converged = history[0] / bnorm <= cfg.tol;
    let mut total_iters = 0usize;
    let mut breakdown = None;

    'outer: while !converged && total_iters < max_iter {
        // preconditioned residual seeds the Krylov space
        let r_true = b.sub(&a.matvec(&x));
        let r0 = match pre {
            Some(m) => m.apply(&r_true),
            None => r_true,
        };
        let beta = r0.norm2();
        if beta == 0.0 {
            converged = true;
            break;
        }
        let m_dim = cycle_len.min(max_iter - total_iters);
        let mut basis: Vec<Vect> = vec![r0.scale(1.0 / beta)];
        // column-major Hessenberg with Givens rotations applied on the fly
        let mut h_cols: Vec<Vec<f64>> = Vec::new();
        let mut givens: Vec<(f64, f64)> = Vec::new();
        let mut g = vec![beta];

        for j in 0..m_dim {
            let mut w = apply(&basis[j]);
            let mut h = vec![0.0; j + 2];
            // modified Gram-Schmidt
            for (i, v) in basis.iter().enumerate() {
                h[i] = w.dot(v);
                w.axpy(-h[i], v);
            }
            let hnext = w.norm2();
            h[j + 1] = hnext;
            let happy = hnext <= 1e-14 * beta.max(1.0);
            if !happy {
                basis.push(w.scale(1.0 / hnext));
            }

            // apply previous rotations to the new column
            for (i, &(c, s)) in givens.iter().enumerate() {
                let t = c * h[i] + s * h[i + 1];
                h[i + 1] = -s * h[i] + c * h[i + 1];
                h[i] = t;
            }
            // new rotation zeroing h[j+1]
            let denom = (h[j] * h[j] + h[j + 1] * h[j + 1]).sqrt();
            let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (h[j] / denom, h[j + 1] / denom) };
            givens.push((c, s));
            h[j] = c * h[j] + s * h[j + 1];
            h[j + 1] = 0.0;
            g.push(-s * g[j]);
            g[j] *= c;
            h_cols.push(h);

            // assemble the current iterate and log the true residual
            let y = back_solve(&h_cols, &g, j + 1);
            let mut xj = x.clone();
            for (k, &yk) in y.iter().enumerate() {
                xj.axpy(yk, &basis[k]);
            }
            let true_res = b.sub(&a.matvec(&xj)).norm2();
            history.push(true_res);
            total_iters += 1;
            if !true_res.is_finite() {
                breakdown = Some("gmres residual overflow".into());
                x = xj;
                break 'outer;
            }
            if true_res / bnorm <= cfg.tol {
                x = xj;
                converged = true;
                break 'outer;
            }
            if happy {
                // Arnoldi breakdown: the Krylov space is invariant, the
                // least-squares solution is exact for the (preconditioned)
                // operator
                x = xj;
                converged = true;
                break 'outer;
            }
            if j + 1 == m_dim {
                x = xj;
            }
        }
    }

    Ok(SolveReport {
        w: x.data().to_vec(),
        n_end: history.len() - 1,
        converged,
        breakdown,
        residual_history: history,
    })
}

/// Solve the upper triangular system R y = g[..k] accumulated by the Givens
/// rotations, where column j of R is h_cols[j][..=j].
fn back_solve(h_cols: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h_cols[j][i] * y[j];
        }
        y[i] = s / h_cols[i][i];
    }
    y
}
