//! Thin SVD via one-sided Jacobi rotations. Deterministic sweep order,
//! accurate at desk scale, no external dependencies.

use super::{Mat, Vect};
use crate::error::{Error, Result};

/// Thin SVD `a = u * diag(sigma) * v^T` with orthonormal `u` (n x k) and
/// `v` (d x k), singular values descending, k = min(n, d).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vect,
    pub v: Mat,
}

const MAX_SWEEPS: usize = 64;

pub fn svd(a: &Mat) -> Result<Svd> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        // A = (A^T)^T: swap the roles of U and V
        let s = svd_tall(&a.transpose())?;
        Ok(Svd { u: s.v, sigma: s.sigma, v: s.u })
    }
}

/// One-sided Jacobi on a tall (m >= k) matrix: orthogonalize the columns of a
/// working copy by plane rotations accumulated into V.
fn svd_tall(a: &Mat) -> Result<Svd> {
    let m = a.rows();
    let k = a.cols();
    let mut b = a.clone();
    let mut v = Mat::identity(k);

    // The inner products below carry rounding error up to ~m*eps relative,
    // so demanding more than that can cycle forever.
    let ortho_tol = (2.0 * m as f64 * f64::EPSILON).max(1e-15);
    // Columns whose norm falls to the rounding floor are numerically null:
    // they are pure noise, never become orthogonal to anything, and must be
    // excluded from rotations (and zeroed at the end) or sweeps cycle.
    let norm_scale = (0..k)
        .map(|j| (0..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let tiny = norm_scale * f64::EPSILON * (m as f64).max(4.0);
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0usize;
        for p in 0..k {
            for q in p + 1..k {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    app += bp * bp;
                    aqq += bq * bq;
                    apq += bp * bq;
                }
                if app.sqrt() <= tiny || aqq.sqrt() <= tiny {
                    continue;
                }
                if apq.abs() <= ortho_tol * (app * aqq).sqrt() {
                    continue;
                }
                off += 1;
                // Rutishauser rotation annihilating the (p,q) inner product
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..m {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    b[(i, p)] = cs * bp - sn * bq;
                    b[(i, q)] = sn * bp + cs * bq;
                }
                for i in 0..k {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = cs * vp - sn * vq;
                    v[(i, q)] = sn * vp + cs * vq;
                }
            }
        }
        if off == 0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { algorithm: "jacobi-svd", limit: MAX_SWEEPS });
    }

    // Column norms are the singular values; sort descending. Norms at the
    // rounding floor are exactly rank-deficiency noise: report them as 0.
    let mut order: Vec<usize> = (0..k).collect();
    let norms: Vec<f64> = (0..k)
        .map(|j| {
            let n = (0..m).map(|i| b[(i, j)] * b[(i, j)]).sum::<f64>().sqrt();
            if n <= tiny {
                0.0
            } else {
                n
            }
        })
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = Mat::zeros(m, k);
    let mut vv = Mat::zeros(k, k);
    let mut sigma = vec![0.0; k];
    for (slot, &j) in order.iter().enumerate() {
        sigma[slot] = norms[j];
        for i in 0..k {
            vv[(i, slot)] = v[(i, j)];
        }
        if norms[j] > 0.0 {
            for i in 0..m {
                u[(i, slot)] = b[(i, j)] / norms[j];
            }
        }
    }
    fill_null_columns(&mut u, &sigma);
    Ok(Svd { u, sigma: Vect::from(sigma), v: vv })
}

/// Replace zero columns of u (rank-deficient input) with vectors orthonormal
/// to the nonzero ones so that u^T u = I still holds.
fn fill_null_columns(u: &mut Mat, sigma: &[f64]) {
    let m = u.rows();
    let k = u.cols();
    for j in 0..k {
        if sigma[j] > 0.0 {
            continue;
        }
        // Gram-Schmidt a basis vector against the existing columns.
        'candidates: for e in 0..m {
            let mut col = vec![0.0; m];
            col[e] = 1.0;
            for jj in 0..k {
                if jj == j || (sigma[jj] == 0.0 && jj > j) {
                    continue;
                }
                let proj: f64 = (0..m).map(|i| u[(i, jj)] * col[i]).sum();
                for i in 0..m {
                    col[i] -= proj * u[(i, jj)];
                }
            }
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for i in 0..m {
                    u[(i, j)] = col[i] / norm;
                }
                break 'candidates;
            }
        }
    }
}
