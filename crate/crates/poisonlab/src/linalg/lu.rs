//! LU factorization with partial pivoting, used as the exact-solution oracle
//! for square systems and inside ILU-free direct paths.

use super::{Mat, Vect, SINGULARITY_CUTOFF};
use crate::error::{Error, Result};

/// Packed LU factors with a row permutation.
#[derive(Debug, Clone)]
pub struct LuFactors {
    /// L (unit lower, implicit diagonal) and U packed in one matrix.
    lu: Mat,
    perm: Vec<usize>,
}

/// Factor a square matrix with partial pivoting, rejecting pivots below a
/// relative cutoff so callers get a clean error on near-singular input.
pub fn lu_factor(a: &Mat) -> Result<LuFactors> {
    // pivot threshold relative to ||a||_inf (max row sum)
    let norm_inf = (0..a.rows())
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    lu_factor_with_threshold(a, SINGULARITY_CUTOFF * norm_inf.max(f64::MIN_POSITIVE))
}

/// Factor with no singularity guard: only an exactly zero pivot fails. Used
/// where the numerical fallout of ill conditioning is itself the object of
/// study (the normal-equations solver), rather than an error to mask.
pub fn lu_factor_unguarded(a: &Mat) -> Result<LuFactors> {
    lu_factor_with_threshold(a, 0.0)
}

fn lu_factor_with_threshold(a: &Mat, threshold: f64) -> Result<LuFactors> {
    assert!(a.is_square(), "lu_factor requires a square matrix");
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut p = k;
        let mut max = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > max {
                max = v;
                p = i;
            }
        }
        if max <= threshold {
            return Err(Error::SingularMatrix { col: k, pivot: max });
        }
        if p != k {
            perm.swap(k, p);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            for j in k + 1..n {
                let v = m * lu[(k, j)];
                lu[(i, j)] -= v;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn solve(&self, b: &Vect) -> Vect {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x = vec![0.0; n];
        // forward substitution on permuted b
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Vect::from(x)
    }
}

/// Solve a x = b for square nonsingular a.
pub fn lu_solve(a: &Mat, b: &Vect) -> Result<Vect> {
    Ok(lu_factor(a)?.solve(b))
}
