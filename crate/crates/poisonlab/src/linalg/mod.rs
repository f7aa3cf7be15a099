//! Dense real linear algebra: matrices, vectors, factorizations, norms and
//! eigen/singular decompositions. Everything is deterministic: fixed sweep
//! orders and shift strategies, no randomized pivoting.

mod eig;
mod lu;
mod svd;

pub use eig::{eig_general, eig_symmetric, spectral_radius, EigenDecomp};
pub use lu::{lu_factor, lu_factor_unguarded, lu_solve, LuFactors};
pub use svd::{svd, Svd};

use crate::error::{Error, Result};

/// Relative cutoff below which a pivot or singular value is treated as zero.
pub const SINGULARITY_CUTOFF: f64 = 1e-13;

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidShape("empty row list".into()));
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidShape("ragged rows".into()));
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &Vect) -> Vect {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            out[i] = row.iter().zip(x.data()).map(|(a, b)| a * b).sum();
        }
        Vect::from(out)
    }

    /// A^T x without forming the transpose.
    pub fn tr_matvec(&self, x: &Vect) -> Vect {
        assert_eq!(self.rows, x.len(), "tr_matvec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for j in 0..self.cols {
                out[j] += self[(i, j)] * xi;
            }
        }
        Vect::from(out)
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: f64) -> Mat {
        let data = self.data.iter().map(|v| c * v).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vect {
    data: Vec<f64>,
}

impl Vect {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidShape("empty vector".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("non-finite vector entry".into()));
        }
        Ok(Self { data })
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn dot(&self, other: &Vect) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Vect) -> Vect {
        Vect { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Vect) -> Vect {
        Vect { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: f64) -> Vect {
        Vect { data: self.data.iter().map(|v| c * v).collect() }
    }

    /// self += c * other
    pub fn axpy(&mut self, c: f64, other: &Vect) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }
}

impl From<Vec<f64>> for Vect {
    fn from(data: Vec<f64>) -> Self {
        Self { data }
    }
}

impl std::ops::Index<usize> for Vect {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for Vect {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// Frobenius norm.
pub fn fnorm(a: &Mat) -> f64 {
    a.data().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Spectral norm sigma_max(a).
pub fn opnorm2(a: &Mat) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let s = svd(a).expect("svd failed on finite matrix");
    s.sigma[0]
}

/// ||a^-1||_2 = 1 / sigma_min(a) for square nonsingular a.
pub fn inv_norm2(a: &Mat) -> Result<f64> {
    let s = svd(a)?;
    let smin = *s.sigma.data().last().unwrap();
    let smax = s.sigma[0];
    if smin <= SINGULARITY_CUTOFF * smax {
        return Err(Error::NumericallySingular);
    }
    Ok(1.0 / smin)
}

/// 2-norm condition number kappa = sigma_max / sigma_min.
pub fn cond2(a: &Mat) -> Result<f64> {
    let s = svd(a)?;
    let smax = s.sigma[0];
    let smin = *s.sigma.data().last().unwrap();
    if smin <= SINGULARITY_CUTOFF * smax {
        return Err(Error::NumericallySingular);
    }
    Ok(smax / smin)
}

/// Minimum-norm least-squares solution of a w = b via SVD pseudoinverse.
pub fn lstsq(a: &Mat, b: &Vect) -> Result<Vect> {
    assert_eq!(a.rows(), b.len(), "lstsq shape mismatch");
    let s = svd(a)?;
    let k = s.sigma.len();
    let cutoff = SINGULARITY_CUTOFF * s.sigma[0].max(f64::MIN_POSITIVE);
    // w = V * diag(1/sigma) * U^T b, dropping sigma below cutoff
    let utb = s.u.tr_matvec(b);
    let mut coeff = vec![0.0; k];
    for i in 0..k {
        if s.sigma[i] > cutoff {
            coeff[i] = utb[i] / s.sigma[i];
        }
    }
    let mut w = vec![0.0; a.cols()];
    for j in 0..a.cols() {
        for i in 0..k {
            w[j] += s.v[(j, i)] * coeff[i];
        }
    }
    Ok(Vect::from(w))
}
