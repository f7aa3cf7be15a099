//! Evaluation metrics, theoretical-bound evaluators, and spectral
//! diagnostics: stationary iteration matrices and their spectral radii,
//! CG residual/eigenvector alignment, gradient smoothness, and the
//! condition number of the eigenvector basis.

mod bounds;
mod ttest;

pub use bounds::{
    forward_bounds, lp_divergence_bound, up_rate_bound, verify_forward, verify_lp_divergence,
    BoundKind, BoundReport, ForwardSample, ForwardVerification, RateBound,
};
pub use ttest::{one_sided_t_test, student_t_cdf, TTestReport};

use crate::datagen::RegressionTask;
use crate::error::{Error, Result};
use crate::linalg::{
    cond2, eig_general, eig_symmetric, lu_solve, svd, Mat, Vect,
};
use crate::solvers::{solve_iterative, SolveReport, SolverConfig, StationaryKind};
use serde::{Deserialize, Serialize};

pub use crate::solvers::gd_smoothness;

/// Per-run accuracy and sensitivity metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalMetrics {
    /// ||y_t - X_t w'||_2
    pub abs_err: f64,
    /// abs_err / ||y_t||_2
    pub rsd: f64,
    /// ||w - w'||_2 against the clean solution from the same solver
    pub sol_err_abs: f64,
    /// sol_err_abs / ||w||_2
    pub sol_err_rel: f64,
    /// kappa of the perturbed train matrix
    pub kappa: f64,
    /// final iteration count on the perturbed system
    pub n_end: usize,
    pub converged: bool,
}

/// Solve the perturbed and clean systems with the same solver and fill all
/// metrics. Solver errors are recorded as non-convergence with
/// n_end = max_iter rather than propagated.
pub fn evaluate(task: &RegressionTask, delta: &Mat, cfg: &SolverConfig) -> EvalMetrics {
    let xp = task.x_train.add(delta);
    let max_iter = cfg.resolved_max_iter(task.x_train.rows());
    let failed = |dim: usize| SolveReport {
        w: vec![0.0; dim],
        residual_history: vec![],
        n_end: max_iter,
        converged: false,
        breakdown: Some("solver error".into()),
    };
    let d = task.x_train.cols();
    let perturbed = solve_iterative(&xp, &task.y_train, cfg).unwrap_or_else(|_| failed(d));
    let clean =
        solve_iterative(&task.x_train, &task.y_train, cfg).unwrap_or_else(|_| failed(d));
    let w_prime = perturbed.solution();
    let w_clean = clean.solution();

    let abs_err = task.y_test.sub(&task.x_test.matvec(&w_prime)).norm2();
    let yt_norm = task.y_test.norm2().max(f64::MIN_POSITIVE);
    let sol_err_abs = w_clean.sub(&w_prime).norm2();
    let w_norm = w_clean.norm2().max(f64::MIN_POSITIVE);
    let kappa = cond2(&xp).unwrap_or(f64::INFINITY);

    EvalMetrics {
        abs_err,
        rsd: abs_err / yt_norm,
        sol_err_abs,
        sol_err_rel: sol_err_abs / w_norm,
        kappa,
        n_end: perturbed.n_end,
        converged: perturbed.converged,
    }
}

/// Iteration matrix of a stationary method for A = D + L + U:
/// T_Jacobi = -D^-1 (L+U), T_GS = -(D+L)^-1 U,
/// T_SOR = (D + omega L)^-1 ((1-omega) D - omega U).
/// Gauss-Seidel is SOR at omega = 1.
pub fn stationary_iteration_matrix(a: &Mat, kind: StationaryKind, omega: f64) -> Result<Mat> {
    assert!(a.is_square(), "iteration matrix requires a square matrix");
    let n = a.rows();
    for i in 0..n {
        if a[(i, i)] == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
    }
    match kind {
        StationaryKind::Jacobi => {
            let mut t = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        t[(i, j)] = -a[(i, j)] / a[(i, i)];
                    }
                }
            }
            Ok(t)
        }
        StationaryKind::GaussSeidel | StationaryKind::Sor => {
            let omega = if matches!(kind, StationaryKind::GaussSeidel) { 1.0 } else { omega };
            // M = D + omega L (lower triangular), N = (1-omega) D - omega U
            let mut m = Mat::zeros(n, n);
            let mut nmat = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if j < i {
                        m[(i, j)] = omega * a[(i, j)];
                    } else if j == i {
                        m[(i, i)] = a[(i, i)];
                        nmat[(i, i)] = (1.0 - omega) * a[(i, i)];
                    } else {
                        nmat[(i, j)] = -omega * a[(i, j)];
                    }
                }
            }
            // T = M^-1 N by forward substitution, column by column
            let mut t = Mat::zeros(n, n);
            for j in 0..n {
                let mut col = vec![0.0; n];
                for i in 0..n {
                    let mut s = nmat[(i, j)];
                    for k in 0..i {
                        s -= m[(i, k)] * col[k];
                    }
                    col[i] = s / m[(i, i)];
                }
                for i in 0..n {
                    t[(i, j)] = col[i];
                }
            }
            Ok(t)
        }
    }
}

/// Affine part of the stationary update x+ = T x + c:
/// c = D^-1 b (Jacobi), c = omega (D + omega L)^-1 b (SOR; omega = 1 for GS).
pub fn stationary_constant(a: &Mat, b: &Vect, kind: StationaryKind, omega: f64) -> Result<Vect> {
    let n = a.rows();
    for i in 0..n {
        if a[(i, i)] == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
    }
    match kind {
        StationaryKind::Jacobi => {
            Ok(Vect::from((0..n).map(|i| b[i] / a[(i, i)]).collect::<Vec<_>>()))
        }
        StationaryKind::GaussSeidel | StationaryKind::Sor => {
            let omega = if matches!(kind, StationaryKind::GaussSeidel) { 1.0 } else { omega };
            let mut c = vec![0.0; n];
            for i in 0..n {
                let mut s = omega * b[i];
                for k in 0..i {
                    s -= omega * a[(i, k)] * c[k];
                }
                c[i] = s / a[(i, i)];
            }
            Ok(Vect::from(c))
        }
    }
}

/// Projections of r0 onto the ascending eigenbasis of a symmetric matrix:
/// returns (||c_1||^2, sum_{i <= k} ||c_i||^2) with c_i = (r0^T v_i) v_i.
pub fn cg_alignment(a: &Mat, r0: &Vect, k: usize) -> Result<(f64, f64)> {
    let n = a.rows();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            let gap = (a[(i, j)] - a[(j, i)]).abs();
            if gap > 1e-9 * scale {
                return Err(Error::NotSymmetric(gap));
            }
        }
    }
    let sym = a.add(&a.transpose()).scale(0.5);
    let (_vals, vecs) = eig_symmetric(&sym)?;
    let first = {
        let v: Vec<f64> = vecs.col(0);
        let c: f64 = v.iter().zip(r0.data()).map(|(a, b)| a * b).sum();
        c * c
    };
    let mut total = 0.0;
    for i in 0..k.min(n) {
        let v = vecs.col(i);
        let c: f64 = v.iter().zip(r0.data()).map(|(a, b)| a * b).sum();
        total += c * c;
    }
    Ok((first, total))
}

/// kappa_2 of the (possibly complex) unit-norm eigenvector basis of `a`,
/// computed through the real 2n x 2n embedding [[Re, -Im], [Im, Re]] whose
/// singular values are those of the complex matrix, doubled.
pub fn eigvec_condition(a: &Mat) -> Result<f64> {
    let n = a.rows();
    // symmetric matrices get the orthonormal Jacobi eigenbasis, so repeated
    // eigenvalues still yield kappa(V) = 1 instead of an arbitrary basis
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let symmetric = (0..n)
        .all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= 1e-12 * scale));
    if symmetric {
        let (_vals, v) = eig_symmetric(a)?;
        let s = svd(&v)?;
        let smin = s.sigma[n - 1];
        if smin <= 1e-12 * s.sigma[0] {
            return Err(Error::DefectiveMatrix);
        }
        return Ok(s.sigma[0] / smin);
    }
    let dec = eig_general(a)?;
    let mut re = Mat::zeros(n, n);
    let mut im = Mat::zeros(n, n);
    for j in 0..n {
        let (vr, vi) = dec.vector(j);
        let norm: f64 =
            vr.iter().zip(&vi).map(|(r, i)| r * r + i * i).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DefectiveMatrix);
        }
        for i in 0..n {
            re[(i, j)] = vr[i] / norm;
            im[(i, j)] = vi[i] / norm;
        }
    }
    let mut emb = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            emb[(i, j)] = re[(i, j)];
            emb[(i, j + n)] = -im[(i, j)];
            emb[(i + n, j)] = im[(i, j)];
            emb[(i + n, j + n)] = re[(i, j)];
        }
    }
    let s = svd(&emb)?;
    let smax = s.sigma[0];
    let smin = s.sigma[2 * n - 1];
    if smin <= 1e-12 * smax {
        return Err(Error::DefectiveMatrix);
    }
    Ok(smax / smin)
}

/// One explicit stationary sweep, for consistency checks against the
/// matrix form T x + c.
pub fn stationary_step(a: &Mat, b: &Vect, x: &Vect, kind: StationaryKind, omega: f64) -> Vect {
    let n = a.rows();
    let omega_eff = match kind {
        StationaryKind::Jacobi => 1.0,
        StationaryKind::GaussSeidel => 1.0,
        StationaryKind::Sor => omega,
    };
    let mut next = x.clone();
    match kind {
        StationaryKind::Jacobi => {
            for i in 0..n {
                let mut s = b[i];
                for j in 0..n {
                    if j != i {
                        s -= a[(i, j)] * x[j];
                    }
                }
                next[i] = s / a[(i, i)];
            }
        }
        StationaryKind::GaussSeidel | StationaryKind::Sor => {
            for i in 0..n {
                let mut s = b[i];
                for j in 0..n {
                    if j != i {
                        s -= a[(i, j)] * next[j];
                    }
                }
                next[i] = (1.0 - omega_eff) * x[i] + omega_eff * s / a[(i, i)];
            }
        }
    }
    next
}

/// Exact reference solution of a square system, used by the bound
/// verifiers, which are stated in terms of exact solutions.
pub fn exact_solve(a: &Mat, b: &Vect) -> Result<Vect> {
    lu_solve(a, b)
}
