//! ILU(0): incomplete LU restricted to the sparsity pattern of the input.
//! On a matrix with no fill-in positions (diagonal, tridiagonal, fully
//! dense) the factors reproduce the exact LU.

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vect};

/// M = L~ U~ with L~ unit lower triangular, U~ upper triangular, both
/// restricted to the nonzero pattern of the factored matrix.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    pub l: Mat,
    pub u: Mat,
    /// Nonzero mask of the input, row-major.
    pub pattern: Vec<bool>,
}

pub fn ilu0(a: &Mat) -> Result<Ilu0> {
    assert!(a.is_square(), "ilu0 requires a square matrix");
    let n = a.rows();
    let pattern: Vec<bool> = a.data().iter().map(|&v| v != 0.0).collect();
    let inside = |i: usize, j: usize| pattern[i * n + j];

    let mut w = a.clone();
    for i in 1..n {
        for k in 0..i {
            if !inside(i, k) {
                continue;
            }
            let pivot = w[(k, k)];
            if pivot == 0.0 {
                return Err(Error::ZeroPivot(k));
            }
            let factor = w[(i, k)] / pivot;
            w[(i, k)] = factor;
            for j in k + 1..n {
                if inside(i, j) {
                    w[(i, j)] -= factor * w[(k, j)];
                }
            }
        }
    }
    for i in 0..n {
        if w[(i, i)] == 0.0 {
            return Err(Error::ZeroPivot(i));
        }
    }

    let mut l = Mat::identity(n);
    let mut u = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j < i {
                l[(i, j)] = w[(i, j)];
            } else {
                u[(i, j)] = w[(i, j)];
            }
        }
    }
    Ok(Ilu0 { l, u, pattern })
}

impl Ilu0 {
    /// Solve M z = r via the two triangular factors.
    pub fn apply(&self, r: &Vect) -> Vect {
        let n = self.l.rows();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = r[i];
            for j in 0..i {
                s -= self.l[(i, j)] * y[j];
            }
            y[i] = s;
        }
        let mut z = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.u[(i, j)] * z[j];
            }
            z[i] = s / self.u[(i, i)];
        }
        Vect::from(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fnorm;

    fn pattern_residual(a: &Mat, f: &Ilu0) -> f64 {
        let lu = f.l.matmul(&f.u);
        let n = a.rows();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if f.pattern[i * n + j] {
                    let d = lu[(i, j)] - a[(i, j)];
                    s += d * d;
                }
            }
        }
        s.sqrt()
    }

    #[test]
    fn diagonal_input() {
        let a = Mat::from_diag(&[2.0, 5.0, -3.0]);
        let f = ilu0(&a).unwrap();
        assert_eq!(f.l, Mat::identity(3));
        assert_eq!(f.u, a);
    }

    #[test]
    fn tridiagonal_is_exact() {
        let a = Mat::from_rows(&[
            &[4.0, -1.0, 0.0, 0.0],
            &[-1.0, 4.0, -1.0, 0.0],
            &[0.0, -1.0, 4.0, -1.0],
            &[0.0, 0.0, -1.0, 4.0],
        ])
        .unwrap();
        let f = ilu0(&a).unwrap();
        let lu = f.l.matmul(&f.u);
        assert!(fnorm(&lu.sub(&a)) <= 1e-10 * fnorm(&a));
    }

    #[test]
    fn pattern_invariant_on_sparse_input() {
        let mut rng = crate::rng::Rng::new(13);
        let t = crate::datagen::gen_sdd_square(&mut rng, 15, 0.25).unwrap();
        let f = ilu0(&t.x_train).unwrap();
        assert!(pattern_residual(&t.x_train, &f) <= 1e-10 * fnorm(&t.x_train));
    }

    #[test]
    fn zero_pivot_detected() {
        let a = Mat::from_rows(&[&[0.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(matches!(ilu0(&a), Err(Error::ZeroPivot(0))));
    }
}
