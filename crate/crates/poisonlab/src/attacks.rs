//! Feature-poisoning optimizers: label-guided perturbation (LP) maximizes
//! the test error of the refitted solution, unconditioning perturbation (UP)
//! maximizes the condition number of the train matrix. Both run projected
//! gradient ascent with backtracking and a keep-best iterate, projecting
//! onto the epsilon ball in the chosen matrix norm.

use crate::datagen::RegressionTask;
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, svd, Mat, Vect, SINGULARITY_CUTOFF};
use serde::{Deserialize, Serialize};

/// Which perturbation family to run (or none, for clean baselines).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AttackKind {
    Lp,
    Up,
    None,
}

impl AttackKind {
    pub fn name(&self) -> &'static str {
        match self {
            AttackKind::Lp => "lp",
            AttackKind::Up => "up",
            AttackKind::None => "none",
        }
    }

    pub fn parse(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(AttackKind::Lp),
            "up" => Ok(AttackKind::Up),
            "none" => Ok(AttackKind::None),
            other => Err(crate::Error::InvalidConfig(format!("unknown attack '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    Spectral,
    Frobenius,
}

/// Perturbation budget: ||delta|| <= epsilon in the chosen norm, optionally
/// constrained to symmetric delta.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerturbBudget {
    pub epsilon: f64,
    pub norm: NormKind,
    pub symmetric: bool,
}

impl PerturbBudget {
    pub fn spectral(epsilon: f64) -> Self {
        Self { epsilon, norm: NormKind::Spectral, symmetric: false }
    }

    pub fn frobenius(epsilon: f64) -> Self {
        Self { epsilon, norm: NormKind::Frobenius, symmetric: false }
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn norm_of(&self, delta: &Mat) -> f64 {
        match self.norm {
            NormKind::Spectral => crate::linalg::opnorm2(delta),
            NormKind::Frobenius => crate::linalg::fnorm(delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradMode {
    Analytic,
    FiniteDiff,
}

/// How the hypergradient is obtained: `Auto` picks the analytic route for
/// square LP systems and central differences for rectangular ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradChoice {
    Auto,
    Analytic,
    FiniteDiff,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimizerParams {
    pub max_iter: usize,
    /// Initial step as a fraction of epsilon.
    pub init_step_frac: f64,
    /// Absolute improvement below which the ascent stops.
    pub improve_tol: f64,
    pub max_halvings: usize,
    pub grad: GradChoice,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            init_step_frac: 0.1,
            improve_tol: 1e-10,
            max_halvings: 20,
            grad: GradChoice::Auto,
        }
    }
}

/// Result of one attack run. The objective trace is the best-so-far
/// sequence, hence non-decreasing, and its last entry is at least the
/// objective of the zero perturbation.
#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub delta: Mat,
    pub objective_trace: Vec<f64>,
    pub iters: usize,
    pub grad_mode: GradMode,
}

/// Project onto the budget ball. Frobenius mode rescales; spectral mode
/// clips the singular values (the Frobenius-metric projection onto the
/// spectral ball). The symmetric flag symmetrizes first. Idempotent.
pub fn project_ball(delta: &Mat, budget: &PerturbBudget) -> Mat {
    let d = if budget.symmetric {
        delta.add(&delta.transpose()).scale(0.5)
    } else {
        delta.clone()
    };
    match budget.norm {
        NormKind::Frobenius => {
            let n = crate::linalg::fnorm(&d);
            // slack keeps re-projection a bitwise no-op despite rescale
            // rounding
            if n <= budget.epsilon * (1.0 + 1e-9) {
                d
            } else {
                d.scale(budget.epsilon / n)
            }
        }
        NormKind::Spectral => {
            if d.max_abs() == 0.0 {
                return d;
            }
            let s = svd(&d).expect("svd of finite matrix");
            // the slack keeps re-projection a bitwise no-op despite the
            // rounding in the clip-and-reassemble path below
            if s.sigma[0] <= budget.epsilon * (1.0 + 1e-9) {
                return d;
            }
            // reassemble with clipped singular values
            let k = s.sigma.len();
            let mut us = s.u.clone();
            for j in 0..k {
                let sv = s.sigma[j].min(budget.epsilon);
                for i in 0..us.rows() {
                    us[(i, j)] *= sv;
                }
            }
            us.matmul(&s.v.transpose())
        }
    }
}

/// UP: maximize kappa(X + delta) subject to the budget. The ascent direction
/// is the singular-value subgradient; a persistently degenerate leading or
/// trailing spectral gap switches the run to central differences.
pub fn attack_up(x: &Mat, budget: &PerturbBudget, opt: &OptimizerParams) -> Result<AttackOutcome> {
    let s0 = svd(x)?;
    let smax0 = s0.sigma[0];
    let smin0 = *s0.sigma.data().last().unwrap();
    if smin0 <= SINGULARITY_CUTOFF * smax0 {
        return Err(Error::NumericallySingular);
    }

    let objective = |delta: &Mat| -> Option<f64> {
        let s = svd(&x.add(delta)).ok()?;
        let smin = *s.sigma.data().last().unwrap();
        let smax = s.sigma[0];
        // below the numerical-singularity cutoff the condition number is not
        // a trustworthy quantity any more; treat such candidates as
        // infeasible, mirroring the check on the clean matrix above
        if smin <= SINGULARITY_CUTOFF * smax {
            return None;
        }
        Some(smax / smin)
    };

    let mut grad_mode = match opt.grad {
        GradChoice::FiniteDiff => GradMode::FiniteDiff,
        _ => GradMode::Analytic,
    };
    let mut degenerate_hits = 0usize;

    let gradient = |delta: &Mat, mode: GradMode, degenerate_hits: &mut usize| -> Option<Mat> {
        match mode {
            GradMode::FiniteDiff => Some(finite_diff_grad(delta, &|d| objective(d))),
            GradMode::Analytic => {
                let s = svd(&x.add(delta)).ok()?;
                let k = s.sigma.len();
                let smax = s.sigma[0];
                let smin = s.sigma[k - 1];
                if smin <= 0.0 {
                    return None;
                }
                let gap_top = if k > 1 { smax - s.sigma[1] } else { smax };
                let gap_bot = if k > 1 { s.sigma[k - 2] - smin } else { smax };
                if gap_top < 1e-10 * smax || gap_bot < 1e-10 * smax {
                    *degenerate_hits += 1;
                    return None; // caller falls back to finite differences
                }
                // d kappa / dX = (1/s_min) u1 v1^T - (s_max/s_min^2) un vn^T
                let mut g = Mat::zeros(x.rows(), x.cols());
                for i in 0..x.rows() {
                    for j in 0..x.cols() {
                        g[(i, j)] = s.u[(i, 0)] * s.v[(j, 0)] / smin
                            - smax / (smin * smin) * s.u[(i, k - 1)] * s.v[(j, k - 1)];
                    }
                }
                Some(g)
            }
        }
    };

    let outcome = ascend(
        x.rows(),
        x.cols(),
        budget,
        opt,
        None,
        &objective,
        &mut |delta| {
            if grad_mode == GradMode::Analytic {
                if let Some(g) = gradient(delta, GradMode::Analytic, &mut degenerate_hits) {
                    return Some(g);
                }
                if degenerate_hits >= 3 {
                    grad_mode = GradMode::FiniteDiff;
                }
                return gradient(delta, GradMode::FiniteDiff, &mut degenerate_hits);
            }
            gradient(delta, GradMode::FiniteDiff, &mut degenerate_hits)
        },
    )?;
    Ok(AttackOutcome { grad_mode, ..outcome })
}

/// LP: maximize ||y_t - X_t w'(delta)|| where w' refits the perturbed train
/// system. Square systems differentiate through the exact solve; rectangular
/// ones go through the normal equations (central differences by default).
pub fn attack_lp(
    task: &RegressionTask,
    budget: &PerturbBudget,
    opt: &OptimizerParams,
) -> Result<AttackOutcome> {
    let x = &task.x_train;
    let square = x.is_square();
    let grad_mode = match opt.grad {
        GradChoice::Analytic => GradMode::Analytic,
        GradChoice::FiniteDiff => GradMode::FiniteDiff,
        GradChoice::Auto => {
            if square {
                GradMode::Analytic
            } else {
                GradMode::FiniteDiff
            }
        }
    };

    let objective = |delta: &Mat| -> Option<f64> {
        let w = inner_solve(&x.add(delta), &task.y_train)?;
        Some(task.y_test.sub(&task.x_test.matvec(&w)).norm2())
    };

    // The ascent is local, and for square systems (exact interpolation, no
    // residual term) the objective has two distinct basins: pure response
    // alignment, and conditioning damage near the singular manifold. Start
    // once from zero and once from the nearest-singularity direction
    // (pushing the smallest singular value down), keep the better.
    let mut starts: Vec<Option<Mat>> = vec![None];
    if square {
        if let Ok(s) = svd(x) {
            let k = s.sigma.len();
            let mut toward_singular = Mat::zeros(x.rows(), x.cols());
            for i in 0..x.rows() {
                for j in 0..x.cols() {
                    toward_singular[(i, j)] =
                        -budget.epsilon * s.u[(i, k - 1)] * s.v[(j, k - 1)];
                }
            }
            starts.push(Some(toward_singular));
        }
    }

    let mut best: Option<AttackOutcome> = None;
    for start in &starts {
        let run =
            ascend(x.rows(), x.cols(), budget, opt, start.as_ref(), &objective, &mut |delta| {
                match grad_mode {
                    GradMode::FiniteDiff => Some(finite_diff_grad(delta, &|d| objective(d))),
                    GradMode::Analytic => lp_hypergradient(task, delta),
                }
            });
        let outcome = match run {
            Ok(o) => o,
            // an auxiliary start may be infeasible (e.g. exactly singular);
            // only the zero start is load-bearing
            Err(_) if start.is_some() => continue,
            Err(e) => return Err(e),
        };
        let better = best
            .as_ref()
            .map_or(true, |b| outcome.objective_trace.last() > b.objective_trace.last());
        if better {
            best = Some(outcome);
        }
    }
    let outcome = best.expect("at least one ascent start");
    Ok(AttackOutcome { grad_mode, ..outcome })
}

/// Analytic LP hypergradient by implicit differentiation of the inner solve.
/// Square case: dJ/dA = -(A^-T g) w'^T. Rectangular case, through the normal
/// equations: dJ/dA = r s^T - (A s) w'^T with s = (A^T A)^-1 g and
/// r = y - A w'. The square formula is the rectangular one at r = 0.
pub fn lp_hypergradient(task: &RegressionTask, delta: &Mat) -> Option<Mat> {
    let a = task.x_train.add(delta);
    let w = inner_solve(&a, &task.y_train)?;
    let rt = task.y_test.sub(&task.x_test.matvec(&w));
    let rt_norm = rt.norm2();
    if rt_norm == 0.0 {
        // objective at a kink; any subgradient works, use zero
        return Some(Mat::zeros(a.rows(), a.cols()));
    }
    let g = task.x_test.tr_matvec(&rt).scale(-1.0 / rt_norm);
    // same (possibly ridge-regularized) gram matrix as the inner refit, so
    // the implicit gradient differentiates exactly the surrogate in use
    let s = lu_solve(&gram_regularized(&a), &g).ok()?;
    let r = task.y_train.sub(&a.matvec(&w));
    let a_s = a.matvec(&s);
    let mut grad = Mat::zeros(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            grad[(i, j)] = r[i] * s[j] - a_s[i] * w[j];
        }
    }
    if !a.is_square() {
        // the ridge weight tracks tr(A^T A), so it moves with the
        // perturbation: d lambda / dA_ij = (2 rho / d) A_ij contributes
        // -(s . w) d lambda through the regularized gram matrix
        let coeff = -s.dot(&w) * 2.0 * RIDGE_REL / a.cols() as f64;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                grad[(i, j)] += coeff * a[(i, j)];
            }
        }
    }
    Some(grad)
}

/// Relative ridge weight of the rectangular inner refit, as a fraction of
/// the mean squared singular value of the perturbed train matrix.
const RIDGE_REL: f64 = 1e-4;

/// Refit the perturbed train system: exact solve when square, ridge-
/// stabilized normal equations otherwise. The ridge term keeps the inner
/// problem well posed everywhere in the budget ball -- a requirement for
/// implicit differentiation -- and bounds the refit amplification, so the
/// surrogate objective has no spurious maximizer at the singular manifold.
pub fn inner_solve(a: &Mat, y: &Vect) -> Option<Vect> {
    if a.is_square() {
        if let Ok(w) = lu_solve(a, y) {
            return Some(w);
        }
    }
    let reg = gram_regularized(a);
    lu_solve(&reg, &a.tr_matvec(y)).ok()
}

/// A^T A plus the relative ridge term (zero ridge for square systems, where
/// the refit is an exact solve).
fn gram_regularized(a: &Mat) -> Mat {
    let mut ata = a.transpose().matmul(a);
    let n = ata.rows();
    let bump = if a.is_square() {
        1e-10 * (1.0 + ata.max_abs())
    } else {
        let mean_sq: f64 = (0..n).map(|i| ata[(i, i)]).sum::<f64>() / n as f64;
        RIDGE_REL * mean_sq.max(f64::MIN_POSITIVE)
    };
    for i in 0..n {
        ata[(i, i)] += bump;
    }
    ata
}

fn finite_diff_grad(delta: &Mat, objective: &dyn Fn(&Mat) -> Option<f64>) -> Mat {
    let h = 1e-6;
    let mut g = Mat::zeros(delta.rows(), delta.cols());
    for i in 0..delta.rows() {
        for j in 0..delta.cols() {
            let mut plus = delta.clone();
            plus[(i, j)] += h;
            let mut minus = delta.clone();
            minus[(i, j)] -= h;
            match (objective(&plus), objective(&minus)) {
                (Some(fp), Some(fm)) => g[(i, j)] = (fp - fm) / (2.0 * h),
                _ => g[(i, j)] = 0.0,
            }
        }
    }
    g
}

/// Shared projected-gradient-ascent loop with backtracking and keep-best,
/// starting from `init` (projected into the ball) or from zero.
fn ascend(
    rows: usize,
    cols: usize,
    budget: &PerturbBudget,
    opt: &OptimizerParams,
    init: Option<&Mat>,
    objective: &dyn Fn(&Mat) -> Option<f64>,
    gradient: &mut dyn FnMut(&Mat) -> Option<Mat>,
) -> Result<AttackOutcome> {
    if !(budget.epsilon > 0.0) {
        return Err(Error::InvalidConfig("epsilon must be > 0".into()));
    }
    let mut best = match init {
        Some(m) => project_ball(m, budget),
        None => Mat::zeros(rows, cols),
    };
    let mut f_best = objective(&best).ok_or(Error::InnerSolveFailure)?;
    let mut trace = vec![f_best];
    let mut step = opt.init_step_frac * budget.epsilon;
    let mut iters = 0usize;

    for it in 0..opt.max_iter {
        iters += 1;
        let dir = match gradient(&best) {
            Some(g) if crate::linalg::fnorm(&g) > 0.0 => {
                let gnorm = crate::linalg::fnorm(&g);
                g.scale(1.0 / gnorm)
            }
            // A zero gradient at the zero start is a kink of the objective
            // (the clean refit reproduces the test labels exactly), not a
            // maximum: almost every direction increases the objective, so
            // probe a fixed pseudo-random one and let the line search and
            // later gradients take over.
            _ if it == 0 && best.max_abs() == 0.0 => {
                let mut rng = crate::rng::Rng::new(0x9E37_79B9_7F4A_7C15);
                let probe = Mat::new(
                    rows,
                    cols,
                    (0..rows * cols).map(|_| rng.normal()).collect(),
                )
                .expect("finite by construction");
                let n = crate::linalg::fnorm(&probe);
                probe.scale(1.0 / n)
            }
            _ => {
                trace.push(f_best);
                break;
            }
        };
        let mut improved = false;
        let mut s = step;
        for _ in 0..=opt.max_halvings {
            let cand = project_ball(&best.add(&dir.scale(s)), budget);
            if let Some(f) = objective(&cand) {
                if f > f_best {
                    let gain = f - f_best;
                    best = cand;
                    f_best = f;
                    // recover the step after halvings but never grow beyond
                    // the initial trust size: larger steps turn the local
                    // ascent into basin hopping
                    step = (s * 2.0).min(opt.init_step_frac * budget.epsilon);
                    improved = true;
                    trace.push(f_best);
                    if gain < opt.improve_tol {
                        return Ok(AttackOutcome {
                            delta: best,
                            objective_trace: trace,
                            iters,
                            grad_mode: GradMode::Analytic,
                        });
                    }
                    break;
                }
            }
            s *= 0.5;
        }
        if !improved {
            trace.push(f_best);
            break;
        }
    }

    Ok(AttackOutcome {
        delta: best,
        objective_trace: trace,
        iters,
        grad_mode: GradMode::Analytic,
    })
}
