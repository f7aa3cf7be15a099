//! General real eigendecomposition: balancing, Householder Hessenberg
//! reduction, Francis double-shift QR for the eigenvalues, and inverse
//! iteration on the original matrix for the eigenvectors. Complex pairs are
//! handled through the real 2n x 2n embedding of (A - lambda I).
//!
//! A separate cyclic-Jacobi path covers symmetric matrices where an
//! orthonormal eigenbasis is needed.

use super::{lu_factor, Mat, Vect};
use crate::error::{Error, Result};

/// Eigenvalues (possibly complex) with eigenvectors stored as real/imag
/// column pairs: column 2i holds Re(v_i), column 2i+1 holds Im(v_i).
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: Vec<(f64, f64)>,
    pub vectors: Mat,
}

impl EigenDecomp {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// (real part, imaginary part) of eigenvector i.
    pub fn vector(&self, i: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.vectors.rows();
        let re = (0..n).map(|r| self.vectors[(r, 2 * i)]).collect();
        let im = (0..n).map(|r| self.vectors[(r, 2 * i + 1)]).collect();
        (re, im)
    }
}

const QR_MAX_ITERS: usize = 60;

/// Full eigendecomposition of a square real matrix.
pub fn eig_general(a: &Mat) -> Result<EigenDecomp> {
    assert!(a.is_square(), "eig_general requires a square matrix");
    let n = a.rows();
    let balanced = balance(a);
    let h = hessenberg(&balanced);
    let mut values = hqr_eigenvalues(h)?;
    // Canonical order: by real part, then imaginary part. Keeps output a
    // deterministic function of the input bits.
    values.sort_by(|x, y| {
        x.0.partial_cmp(&y.0).unwrap().then(x.1.partial_cmp(&y.1).unwrap())
    });

    let norm = super::fnorm(a).max(f64::MIN_POSITIVE);
    let mut vectors = Mat::zeros(n, 2 * n);
    for (i, &(re, im)) in values.iter().enumerate() {
        let (vr, vi) = eigenvector(a, re, im, norm, i)?;
        for r in 0..n {
            vectors[(r, 2 * i)] = vr[r];
            vectors[(r, 2 * i + 1)] = vi[r];
        }
    }
    Ok(EigenDecomp { values, vectors })
}

/// Spectral radius: max |lambda_i| over the full spectrum.
pub fn spectral_radius(a: &Mat) -> Result<f64> {
    // Eigenvalues only; skip the eigenvector pass.
    assert!(a.is_square(), "spectral_radius requires a square matrix");
    let h = hessenberg(&balance(a));
    let values = hqr_eigenvalues(h)?;
    Ok(values.iter().map(|&(re, im)| re.hypot(im)).fold(0.0, f64::max))
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues ascending with orthonormal eigenvectors as columns.
pub fn eig_symmetric(a: &Mat) -> Result<(Vect, Mat)> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    let max_sweeps = 64;
    let mut done = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= 1e-15 * super::fnorm(a).max(f64::MIN_POSITIVE) {
            done = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - s * miq;
                    m[(i, q)] = s * mip + c * miq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = c * mpj - s * mqj;
                    m[(q, j)] = s * mpj + c * mqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    if !done {
        return Err(Error::NoConvergence { algorithm: "jacobi-sym", limit: max_sweeps });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let mut vals = vec![0.0; n];
    let mut vecs = Mat::zeros(n, n);
    for (slot, &j) in order.iter().enumerate() {
        vals[slot] = m[(j, j)];
        for i in 0..n {
            vecs[(i, slot)] = v[(i, j)];
        }
    }
    Ok((Vect::from(vals), vecs))
}

/// Parlett-Reinsch balancing: scale rows/columns by powers of 2 to even out
/// row and column norms. Similarity transform, so eigenvalues are unchanged.
fn balance(a: &Mat) -> Mat {
    let n = a.rows();
    let mut m = a.clone();
    let radix = 2.0_f64;
    let sqrdx = radix * radix;
    loop {
        let mut last = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                let mut cc = c;
                while cc < g {
                    f *= radix;
                    cc *= sqrdx;
                }
                g = r * radix;
                while cc > g {
                    f /= radix;
                    cc /= sqrdx;
                }
                if (cc + r) / f < 0.95 * s {
                    last = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        m[(i, j)] *= ginv;
                    }
                    for j in 0..n {
                        m[(j, i)] *= f;
                    }
                }
            }
        }
        if last {
            break;
        }
    }
    m
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &Mat) -> Mat {
    let n = a.rows();
    let mut h = a.clone();
    for k in 1..n.saturating_sub(1) {
        // zero column k-1 below row k
        let mut alpha = 0.0_f64;
        for i in k..n {
            alpha += h[(i, k - 1)] * h[(i, k - 1)];
        }
        alpha = alpha.sqrt();
        if alpha == 0.0 {
            continue;
        }
        if h[(k, k - 1)] > 0.0 {
            alpha = -alpha;
        }
        let mut v = vec![0.0; n];
        v[k] = h[(k, k - 1)] - alpha;
        for i in k + 1..n {
            v[i] = h[(i, k - 1)];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // H <- (I - beta v v^T) H
        for j in 0..n {
            let s: f64 = (k..n).map(|i| v[i] * h[(i, j)]).sum();
            let s = beta * s;
            for i in k..n {
                h[(i, j)] -= s * v[i];
            }
        }
        // H <- H (I - beta v v^T)
        for i in 0..n {
            let s: f64 = (k..n).map(|j| v[j] * h[(i, j)]).sum();
            let s = beta * s;
            for j in k..n {
                h[(i, j)] -= s * v[j];
            }
        }
        // clean the column explicitly
        h[(k, k - 1)] = alpha;
        for i in k + 1..n {
            h[(i, k - 1)] = 0.0;
        }
    }
    h
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
/// Follows the classic EISPACK `hqr` routine.
fn hqr_eigenvalues(mut a: Mat) -> Result<Vec<(f64, f64)>> {
    let n = a.rows();
    let mut values: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut anorm = 0.0_f64;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![(0.0, 0.0); n]);
    }
    let eps = f64::EPSILON;
    let mut nn = n as isize - 1;
    let mut t = 0.0_f64;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn;
            while l > 0 {
                let s = a[((l - 1) as usize, (l - 1) as usize)].abs()
                    + a[(l as usize, l as usize)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[(l as usize, (l - 1) as usize)].abs() <= eps * s {
                    a[(l as usize, (l - 1) as usize)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[(nn as usize, nn as usize)];
            if l == nn {
                values.push((x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = a[((nn - 1) as usize, (nn - 1) as usize)];
            let w = a[(nn as usize, (nn - 1) as usize)] * a[((nn - 1) as usize, nn as usize)];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    values.push((x + z, 0.0));
                    if z != 0.0 {
                        values.push((x - w / z, 0.0));
                    } else {
                        values.push((x + z, 0.0));
                    }
                } else {
                    values.push((x + p, z));
                    values.push((x + p, -z));
                }
                nn -= 2;
                break;
            }
            if its == QR_MAX_ITERS {
                return Err(Error::NoConvergence { algorithm: "francis-qr", limit: QR_MAX_ITERS });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its != 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 0..=nn as usize {
                    a[(i, i)] -= x;
                }
                let s = a[(nn as usize, (nn - 1) as usize)].abs()
                    + a[((nn - 1) as usize, (nn - 2) as usize)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // form shift and look for two consecutive small subdiagonals
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let mu = m as usize;
                let z = a[(mu, mu)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(mu + 1, mu)] + a[(mu, mu + 1)];
                q = a[(mu + 1, mu + 1)] - z - rr - ss;
                r = a[(mu + 2, mu + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(mu, mu - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[(mu - 1, mu - 1)].abs() + z.abs() + a[(mu + 1, mu + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i as usize, (i - 2) as usize)] = 0.0;
                if i > m + 2 {
                    a[(i as usize, (i - 3) as usize)] = 0.0;
                }
            }
            // double QR step on rows l..nn, columns m..nn
            for k in m..=(nn - 1) {
                let ku = k as usize;
                if k != m {
                    p = a[(ku, ku - 1)];
                    q = a[(ku + 1, ku - 1)];
                    r = if k != nn - 1 { a[(ku + 2, ku - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(ku, ku - 1)] = -a[(ku, ku - 1)];
                    }
                } else {
                    a[(ku, ku - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                // row modification
                for j in ku..=(nn as usize) {
                    let mut pp = a[(ku, j)] + q * a[(ku + 1, j)];
                    if k != nn - 1 {
                        pp += r * a[(ku + 2, j)];
                        a[(ku + 2, j)] -= pp * z;
                    }
                    a[(ku + 1, j)] -= pp * y;
                    a[(ku, j)] -= pp * x;
                }
                // column modification
                let mmin = if (nn as usize) < ku + 3 { nn as usize } else { ku + 3 };
                for i in (l as usize)..=mmin {
                    let mut pp = x * a[(i, ku)] + y * a[(i, ku + 1)];
                    if k != nn - 1 {
                        pp += z * a[(i, ku + 2)];
                        a[(i, ku + 2)] -= pp * r;
                    }
                    a[(i, ku + 1)] -= pp * q;
                    a[(i, ku)] -= pp;
                }
            }
        }
    }
    Ok(values)
}

/// Inverse iteration for one eigenvalue on the original matrix. Complex
/// eigenvalues go through the real 2n x 2n embedding
/// [[A - xI, yI], [-yI, A - xI]].
fn eigenvector(a: &Mat, re: f64, im: f64, norm: f64, idx: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let tol = 1e-9 * norm;
    // try progressively larger shift perturbations if (A - lambda I) is
    // numerically exactly singular or the iteration stalls
    for attempt in 0..6 {
        let jitter = norm * 1e-11 * 10f64.powi(attempt);
        let shift_re = re + jitter;
        let result = if im == 0.0 {
            inverse_iteration_real(a, shift_re, idx)
        } else {
            inverse_iteration_complex(a, shift_re, im, idx)
        };
        if let Some((vr, vi)) = result {
            let resid = eig_residual(a, re, im, &vr, &vi);
            if resid <= tol.max(1e-300) || attempt == 5 {
                return Ok((vr, vi));
            }
        }
    }
    Err(Error::NoConvergence { algorithm: "inverse-iteration", limit: 6 })
}

fn start_vector(n: usize, idx: usize) -> Vec<f64> {
    (0..n).map(|j| 1.0 / (1.0 + ((j + idx) % n) as f64)).collect()
}

fn inverse_iteration_real(a: &Mat, shift: f64, idx: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = a.rows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = lu_factor(&m).ok()?;
    let mut v = Vect::from(start_vector(n, idx));
    for _ in 0..4 {
        let next = lu.solve(&v);
        let norm = next.norm2();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v = next.scale(1.0 / norm);
    }
    Some((v.data().to_vec(), vec![0.0; n]))
}

fn inverse_iteration_complex(a: &Mat, x: f64, y: f64, idx: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = a.rows();
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[(i, j)];
            m[(n + i, n + j)] = a[(i, j)];
        }
        m[(i, i)] -= x;
        m[(n + i, n + i)] -= x;
        m[(i, n + i)] += y;
        m[(n + i, i)] -= y;
    }
    let lu = lu_factor(&m).ok()?;
    let mut v = Vect::from(
        start_vector(n, idx)
            .into_iter()
            .chain((0..n).map(|j| 0.5 / (1.0 + j as f64)))
            .collect::<Vec<_>>(),
    );
    for _ in 0..4 {
        let next = lu.solve(&v);
        let norm = next.norm2();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v = next.scale(1.0 / norm);
    }
    let vr = v.data()[..n].to_vec();
    let vi = v.data()[n..].to_vec();
    Some((vr, vi))
}

/// || A v - lambda v ||_2 for a complex pair (vr, vi), relative to nothing.
pub(crate) fn eig_residual(a: &Mat, re: f64, im: f64, vr: &[f64], vi: &[f64]) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        let mut ar = 0.0;
        let mut ai = 0.0;
        for j in 0..n {
            ar += a[(i, j)] * vr[j];
            ai += a[(i, j)] * vi[j];
        }
        let lr = re * vr[i] - im * vi[i];
        let li = re * vi[i] + im * vr[i];
        s += (ar - lr) * (ar - lr) + (ai - li) * (ai - li);
    }
    s.sqrt()
}
