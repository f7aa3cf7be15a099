//! One-sided one-sample Student t-test and the t CDF via the regularized
//! incomplete beta function (continued-fraction evaluation).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TTestReport {
    pub t_stat: f64,
    pub p_value: f64,
    pub df: usize,
    pub n_samples: usize,
    pub reject_null: bool,
}

/// Test H0: mean(d) >= 0 against H1: mean(d) < 0 at significance `xi`.
/// t = mean / (s / sqrt(n)); the p-value is P(T <= t) under t_{n-1}.
pub fn one_sided_t_test(d: &[f64], xi: f64) -> Result<TTestReport> {
    let n = d.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let df = n - 1;
    let t = mean / (var / n as f64).sqrt();
    let p = student_t_cdf(t, df as f64);
    Ok(TTestReport { t_stat: t, p_value: p, df, n_samples: n, reject_null: p < xi })
}

/// P(T <= t) for Student's t with `nu` degrees of freedom.
pub fn student_t_cdf(t: f64, nu: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let x = nu / (nu + t * t);
    let tail = 0.5 * betai(0.5 * nu, 0.5, x);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Regularized incomplete beta function I_x(a, b).
fn betai(a: f64, b: f64, x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "betai domain");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // use the continued fraction in its rapidly-converging region
    if x < (a + 1.0) / (a + b + 2.0) {
        front * betacf(a, b, x) / a
    } else {
        1.0 - front * betacf(b, a, 1.0 - x) / b
    }
}

/// Lentz continued fraction for the incomplete beta function.
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos approximation of ln Gamma (g = 5, 6 coefficients).
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_7e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000_000_000_190_015;
    for c in COEF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_example_df2() {
        let rep = one_sided_t_test(&[-1.0, -2.0, -3.0], 0.05).unwrap();
        assert!((rep.t_stat + 3.4641).abs() < 1e-4, "t = {}", rep.t_stat);
        assert_eq!(rep.df, 2);
        // closed form for df = 2: F(t) = 1/2 + t / (2 sqrt(2 + t^2))
        let t = rep.t_stat;
        let closed = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
        assert!((rep.p_value - closed).abs() < 1e-10);
        assert!((rep.p_value - 0.03709).abs() < 1e-5);
        assert!(rep.reject_null);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(one_sided_t_test(&[1.0, 2.0], 0.05), Err(Error::TooFewSamples(2))));
        assert!(matches!(one_sided_t_test(&[0.0; 5], 0.05), Err(Error::ZeroVariance)));
    }

    #[test]
    fn cdf_symmetry_and_midpoint() {
        for nu in [1.0, 2.0, 7.0, 50.0] {
            assert!((student_t_cdf(0.0, nu) - 0.5).abs() < 1e-15);
            for t in [0.3, 1.0, 2.5, 6.0] {
                let sum = student_t_cdf(t, nu) + student_t_cdf(-t, nu);
                assert!((sum - 1.0).abs() < 1e-12, "nu={nu} t={t}");
            }
        }
    }

    /// Simpson integration of the t density as an independent oracle.
    fn t_cdf_by_integration(t: f64, nu: f64) -> f64 {
        let norm = (ln_gamma((nu + 1.0) / 2.0)
            - ln_gamma(nu / 2.0)
            - 0.5 * (nu * std::f64::consts::PI).ln())
        .exp();
        let density = |u: f64| norm * (1.0 + u * u / nu).powf(-(nu + 1.0) / 2.0);
        let (lo, hi) = (0.0f64, t.abs());
        let steps = 20_000usize;
        let h = (hi - lo) / steps as f64;
        let mut s = density(lo) + density(hi);
        for i in 1..steps {
            let u = lo + i as f64 * h;
            s += density(u) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let half = s * h / 3.0;
        if t >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    #[test]
    fn cdf_matches_numerical_integration() {
        for nu in [2.0, 5.0, 10.0, 99.0] {
            for t in [-4.0, -2.6485, -1.0, -0.2, 0.7, 3.1] {
                let got = student_t_cdf(t, nu);
                let want = t_cdf_by_integration(t, nu);
                assert!((got - want).abs() < 1e-6, "nu={nu} t={t}: {got} vs {want}");
            }
        }
    }
}
