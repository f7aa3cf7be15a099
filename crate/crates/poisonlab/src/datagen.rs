//! Deterministic synthesis of regression tasks: small dense rectangular
//! systems for the direct solver and symmetric diagonally dominant square
//! systems for the iterative solvers.

use crate::error::{Error, Result};
use crate::linalg::{lstsq, lu_solve, Mat, Vect};
use crate::rng::Rng;

/// A train/test regression system with its reference solution.
#[derive(Debug, Clone)]
pub struct RegressionTask {
    pub x_train: Mat,
    pub y_train: Vect,
    pub x_test: Mat,
    pub y_test: Vect,
    /// Least-squares (or exact) solution of the clean train system.
    pub w_ref: Vect,
}

/// Default diagonal boost added on top of the off-diagonal row sums. Sized
/// so the smallest eigenvalue sits just above the largest perturbation
/// budget used in the sweeps (2.0): attacks can push one eigenvalue close
/// to zero -- slowing the stationary methods sharply while a Krylov method
/// only pays a couple of extra iterations for the outlier -- but can never
/// drive the train matrix through singularity.
pub const DEFAULT_DIAG_BOOST: f64 = 2.5;
/// Default fill density of the sparse pattern.
pub const DEFAULT_DENSITY: f64 = 0.3;

/// Dense rectangular regression data: normal features scaled to unit
/// expected row norm, uniform scaled ground-truth coefficients, optional
/// label noise. Test labels are regenerated from the fitted solution so both
/// task families share one evaluation path.
pub fn gen_dense_regression(
    rng: &mut Rng,
    n_train: usize,
    n_test: usize,
    d: usize,
    noise_std: f64,
) -> Result<RegressionTask> {
    if d < 1 || n_train < d || n_test < 1 {
        return Err(Error::InvalidShape(format!(
            "dense task needs n_train >= d >= 1 and n_test >= 1, got n_train={n_train}, n_test={n_test}, d={d}"
        )));
    }
    if noise_std < 0.0 {
        return Err(Error::InvalidShape("noise_std must be >= 0".into()));
    }
    // Reject pathologically conditioned draws: at desk scale a single
    // near-singular train matrix dominates every campaign statistic, and
    // the perturbation studies need conditioning to be the attacks' doing,
    // not the sampler's.
    const MAX_CLEAN_COND: f64 = 25.0;
    // Normalize the distance to singularity: the train features are rescaled
    // so the smallest singular value is a fixed reference just under one.
    // Perturbation budgets then mean the same thing across seeds and feature
    // counts -- a spectral budget of 1.0 is always barely enough to reach the
    // singular manifold.
    const TARGET_SMIN: f64 = 0.95;
    let mut x_train = normal_mat(rng, n_train, d);
    let mut smin = 0.0;
    for _ in 0..64 {
        let s = crate::linalg::svd(&x_train)?;
        smin = s.sigma[s.sigma.len() - 1];
        if smin > 0.0 && s.sigma[0] <= MAX_CLEAN_COND * smin {
            break;
        }
        x_train = normal_mat(rng, n_train, d);
    }
    if smin <= 0.0 {
        return Err(Error::SingularMatrix { col: d.saturating_sub(1), pivot: 0.0 });
    }
    let scale = TARGET_SMIN / smin;
    let x_train = x_train.scale(scale);
    let x_test = normal_mat(rng, n_test, d).scale(scale);
    let coef = Vect::from((0..d).map(|_| 100.0 * rng.uniform()).collect::<Vec<_>>());
    let mut y_train = x_train.matvec(&coef);
    if noise_std > 0.0 {
        for i in 0..n_train {
            y_train[i] += noise_std * rng.normal();
        }
    }
    let w_ref = lstsq(&x_train, &y_train)?;
    let y_test = x_test.matvec(&w_ref);
    Ok(RegressionTask { x_train, y_train, x_test, y_test, w_ref })
}

/// Square symmetric diagonally dominant system from a sparse random pattern:
/// uniform off-diagonal values, symmetrized, with each diagonal entry set to
/// the off-diagonal row sum plus a fixed boost. Labels are uniform on [0,1).
pub fn gen_sdd_square(rng: &mut Rng, n: usize, density: f64) -> Result<RegressionTask> {
    if n < 2 {
        return Err(Error::InvalidShape("sdd task needs n >= 2".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidShape(format!("density {density} outside (0, 1]")));
    }
    let x_train = sdd_matrix(rng, n, density);
    let y_train = Vect::from((0..n).map(|_| rng.uniform()).collect::<Vec<_>>());
    let x_test = sdd_matrix(rng, n, density);
    let w_ref = lu_solve(&x_train, &y_train)?;
    let y_test = x_test.matvec(&w_ref);
    Ok(RegressionTask { x_train, y_train, x_test, y_test, w_ref })
}

fn normal_mat(rng: &mut Rng, rows: usize, cols: usize) -> Mat {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.normal()).collect();
    Mat::new(rows, cols, data).expect("finite by construction")
}

fn sdd_matrix(rng: &mut Rng, n: usize, density: f64) -> Mat {
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.uniform() < density {
                a[(i, j)] = rng.uniform();
            }
        }
    }
    // symmetrize, then make the diagonal strictly dominant
    let at = a.transpose();
    let mut a = a.add(&at).scale(0.5);
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        a[(i, i)] = off + DEFAULT_DIAG_BOOST;
    }
    a
}
