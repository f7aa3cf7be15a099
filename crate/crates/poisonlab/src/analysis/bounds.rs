//! Theoretical bound evaluators and their empirical verifiers: the forward
//! perturbation bound on the solution of a square system, the slowed
//! gradient-descent rate under an unconditioning perturbation, and the
//! lower bound on solution divergence under a label-guided perturbation.

use super::ttest::{one_sided_t_test, TTestReport};
use crate::attacks::{attack_lp, attack_up, AttackKind, OptimizerParams, PerturbBudget};
use crate::datagen::RegressionTask;
use crate::error::{Error, Result};
use crate::linalg::{cond2, inv_norm2, lu_solve, opnorm2, Mat, Vect};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    ForwardRel,
    ForwardOutput,
    UpRate,
    LpDivergence,
}

/// One evaluated bound: its value, the measured quantity, whether the
/// hypotheses held, and whether the inequality held.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub bound_value: f64,
    pub empirical_value: f64,
    pub precondition_ok: bool,
    pub holds: bool,
    pub params: BTreeMap<String, f64>,
}

/// Forward perturbation bounds for a square nonsingular system under a
/// feature perturbation of spectral norm at most epsilon:
/// relative solution bound eps*||X^-1|| / (1 - eps*||X^-1||) and
/// output bound eps*||w||*kappa(X) / (1 - eps*||X^-1||).
/// Requires eps*||X^-1|| < 1.
pub fn forward_bounds(x: &Mat, w: &Vect, epsilon: f64) -> Result<(f64, f64)> {
    let inv = inv_norm2(x)?;
    let margin = epsilon * inv;
    if margin >= 1.0 {
        return Err(Error::PreconditionFailed(margin));
    }
    let kappa = cond2(x)?;
    let rel = margin / (1.0 - margin);
    let output = epsilon * w.norm2() * kappa / (1.0 - margin);
    Ok((rel, output))
}

/// One verified run of the forward bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForwardSample {
    pub sol_err_rel: f64,
    pub rel_bound: f64,
    pub output_err: f64,
    pub output_bound: f64,
    pub holds_rel: bool,
    pub holds_output: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForwardVerification {
    pub ttest: TTestReport,
    pub samples: Vec<ForwardSample>,
    /// Tasks skipped because eps*||X^-1|| >= 1.
    pub excluded: usize,
}

/// For each square task, run the attack at budget epsilon, solve the clean
/// and perturbed systems exactly, and compare the relative solution error
/// against the forward bound; then run a one-sided t-test of
/// H0: mean(err - bound) >= 0 against H1: mean < 0 at significance xi.
pub fn verify_forward(
    tasks: &[RegressionTask],
    attack: AttackKind,
    epsilon: f64,
    xi: f64,
) -> Result<ForwardVerification> {
    let opt = OptimizerParams::default();
    let mut samples = Vec::new();
    let mut diffs = Vec::new();
    let mut excluded = 0usize;

    for task in tasks {
        let x = &task.x_train;
        assert!(x.is_square(), "forward verification requires square systems");
        let w = match lu_solve(x, &task.y_train) {
            Ok(w) => w,
            Err(_) => {
                excluded += 1;
                continue;
            }
        };
        let (rel_bound, output_bound) = match forward_bounds(x, &w, epsilon) {
            Ok(b) => b,
            Err(Error::PreconditionFailed(_)) => {
                excluded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let budget = PerturbBudget::spectral(epsilon);
        let delta = match attack {
            AttackKind::Lp => attack_lp(task, &budget, &opt)?.delta,
            AttackKind::Up => attack_up(x, &budget, &opt)?.delta,
            AttackKind::None => Mat::zeros(x.rows(), x.cols()),
        };
        let w_prime = match lu_solve(&x.add(&delta), &task.y_train) {
            Ok(w) => w,
            Err(_) => {
                // the bound guarantees nonsingularity under its hypotheses;
                // a failed solve would be a genuine violation
                excluded += 1;
                continue;
            }
        };
        let sol_err_rel = w.sub(&w_prime).norm2() / w.norm2().max(f64::MIN_POSITIVE);
        let output_err = x.matvec(&w_prime).sub(&x.matvec(&w)).norm2();
        samples.push(ForwardSample {
            sol_err_rel,
            rel_bound,
            output_err,
            output_bound,
            holds_rel: sol_err_rel <= rel_bound * (1.0 + 1e-9),
            holds_output: output_err <= output_bound * (1.0 + 1e-9) + 1e-12,
        });
        diffs.push(sol_err_rel - rel_bound);
    }

    let ttest = one_sided_t_test(&diffs, xi)?;
    Ok(ForwardVerification { ttest, samples, excluded })
}

/// The slowed GD rate bound T -> coeff / T.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateBound {
    pub coeff: f64,
}

impl RateBound {
    pub fn at(&self, t: f64) -> f64 {
        self.coeff / t
    }
}

/// Suboptimality envelope for GD on a system whose largest singular value
/// grew by the factor alpha: f(w_T) - f* <= C / (gamma (2 - gamma alpha^2 L) T),
/// valid for 0 < gamma <= 1/L and alpha^2 < 2/(gamma L). Also returns the
/// iteration floor for beta-accuracy. alpha = 1 recovers the clean C*L/T
/// envelope at gamma = 1/L.
pub fn up_rate_bound(
    c: f64,
    gamma: f64,
    alpha: f64,
    l_clean: f64,
    beta: f64,
) -> Result<(RateBound, f64)> {
    if !(gamma > 0.0) || gamma > 1.0 / l_clean * (1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "gamma = {gamma} outside (0, 1/L] with L = {l_clean}"
        )));
    }
    let denom = 2.0 - gamma * alpha * alpha * l_clean;
    if denom <= 0.0 {
        return Err(Error::InvalidAlpha(denom));
    }
    let coeff = c / (gamma * denom);
    let t_min = coeff / beta;
    Ok((RateBound { coeff }, t_min))
}

/// Lower bound on the solution divergence when the labels move by at least
/// eta while the features move by at most epsilon:
/// ||w* - w'|| >= (eta / ||X||) / (1 + eps ||X^-1||).
pub fn lp_divergence_bound(x: &Mat, epsilon: f64, eta: f64) -> Result<f64> {
    let inv = inv_norm2(x)?;
    let opn = opnorm2(x);
    Ok((eta / opn) / (1.0 + epsilon * inv))
}

/// Companion verifier: given an explicit perturbation pair, measure eta and
/// epsilon, evaluate the bound, and check the inequality. The hypothesis
/// flag records the boundedness condition on the perturbed solution,
/// ||w'|| <= eta ||X^-1|| / (1 + eps ||X^-1||), under which the bound is
/// guaranteed.
pub fn verify_lp_divergence(
    x: &Mat,
    delta_x: &Mat,
    delta_y: &Vect,
    w_star: &Vect,
    w_prime: &Vect,
) -> Result<BoundReport> {
    let eta = delta_y.norm2();
    let epsilon = opnorm2(delta_x);
    let bound = lp_divergence_bound(x, epsilon, eta)?;
    let empirical = w_star.sub(w_prime).norm2();
    let inv = inv_norm2(x)?;
    let precondition_ok =
        w_prime.norm2() <= eta * inv / (1.0 + epsilon * inv) * (1.0 + 1e-9);
    let mut params = BTreeMap::new();
    params.insert("epsilon".into(), epsilon);
    params.insert("eta".into(), eta);
    params.insert("inv_norm".into(), inv);
    Ok(BoundReport {
        kind: BoundKind::LpDivergence,
        bound_value: bound,
        empirical_value: empirical,
        precondition_ok,
        holds: empirical >= bound * (1.0 - 1e-9),
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::gen_dense_regression;
    use crate::rng::Rng;

    #[test]
    fn forward_bounds_reference_values() {
        let i2 = Mat::identity(2);
        let w = Vect::from(vec![2.0, 0.0]);
        let (rel, out) = forward_bounds(&i2, &w, 0.5).unwrap();
        assert!((rel - 1.0).abs() < 1e-12);
        assert!((out - 2.0).abs() < 1e-12);

        let d = Mat::from_diag(&[2.0, 0.5]);
        let (rel2, _) = forward_bounds(&d, &w, 0.2).unwrap();
        assert!((rel2 - 0.4 / 0.6).abs() < 1e-12);

        assert!(matches!(
            forward_bounds(&d, &w, 0.6),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn up_rate_reference_values() {
        // alpha = 1, gamma = 1/L reduces to C*L/T
        let (b, _) = up_rate_bound(3.0, 0.5, 1.0, 2.0, 0.01).unwrap();
        assert!((b.at(10.0) - 3.0 * 2.0 / 10.0).abs() < 1e-12);

        let (_, t_min) = up_rate_bound(1.0, 0.1, 1.5, 2.0, 0.01).unwrap();
        assert!((t_min - 1.0 / (0.1 * 1.55 * 0.01)).abs() < 1e-6);
        assert!((t_min - 645.16).abs() < 0.01);

        assert!(matches!(
            up_rate_bound(1.0, 0.5, 2.0, 2.0, 0.01),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn lp_divergence_reference_values() {
        let i3 = Mat::identity(3);
        let b = lp_divergence_bound(&i3, 0.1, 1.0).unwrap();
        assert!((b - 1.0 / 1.1).abs() < 1e-12);
        assert_eq!(lp_divergence_bound(&i3, 0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn lp_divergence_identity_construction() {
        // X = I, dX = 0, dy = eta e1: the divergence is exactly eta
        let eta = 0.7;
        let x = Mat::identity(3);
        let y = Vect::from(vec![1.0, 2.0, 3.0]);
        let w_star = lu_solve(&x, &y).unwrap();
        let mut y2 = y.clone();
        y2[0] += eta;
        let w_prime = lu_solve(&x, &y2).unwrap();
        let dy = y2.sub(&y);
        let rep =
            verify_lp_divergence(&x, &Mat::zeros(3, 3), &dy, &w_star, &w_prime).unwrap();
        assert!(rep.holds);
        assert!((rep.empirical_value - eta).abs() < 1e-12);
        assert!((rep.bound_value - eta).abs() < 1e-12);
    }

    #[test]
    fn verify_forward_small_campaign() {
        let mut tasks = Vec::new();
        for seed in 0..40u64 {
            let mut rng = Rng::new(1000 + seed);
            tasks.push(gen_dense_regression(&mut rng, 3, 3, 3, 0.0).unwrap());
        }
        let out = verify_forward(&tasks, AttackKind::Lp, 0.01, 0.05).unwrap();
        for s in &out.samples {
            assert!(s.holds_rel, "forward bound violated: {s:?}");
            assert!(s.holds_output, "output bound violated: {s:?}");
        }
        assert!(out.ttest.t_stat < 0.0);
    }
}
