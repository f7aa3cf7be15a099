//! Solver catalog: the normal-equations direct solver plus six iterative
//! methods (GD, Jacobi, Gauss-Seidel, SOR, CG, GMRES) with residual
//! tracking, and ILU(0) preconditioning for the Krylov methods.

mod gd;
mod ilu;
mod krylov;
mod stationary;

pub use ilu::{ilu0, Ilu0};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vect};
use serde::{Deserialize, Serialize};

/// Which iterative method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    Nes,
    Gd,
    Jacobi,
    GaussSeidel,
    Sor,
    Cg,
    Gmres,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Nes => "nes",
            SolverKind::Gd => "gd",
            SolverKind::Jacobi => "jacobi",
            SolverKind::GaussSeidel => "gauss_seidel",
            SolverKind::Sor => "sor",
            SolverKind::Cg => "cg",
            SolverKind::Gmres => "gmres",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "nes" => SolverKind::Nes,
            "gd" => SolverKind::Gd,
            "jacobi" => SolverKind::Jacobi,
            "gauss_seidel" | "gs" => SolverKind::GaussSeidel,
            "sor" => SolverKind::Sor,
            "cg" => SolverKind::Cg,
            "gmres" => SolverKind::Gmres,
            other => return Err(Error::InvalidConfig(format!("unknown solver `{other}`"))),
        })
    }
}

/// Stationary splittings, shared with the iteration-matrix diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryKind {
    Jacobi,
    GaussSeidel,
    Sor,
}

/// GD step size: fixed or 1/L with L = 2 sigma_max(A)^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSize {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precondition {
    None,
    Ilu0,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// Relative true-residual tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Iteration cap; `None` picks 10n for stationary/Krylov methods and
    /// 100_000 for GD.
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// SOR relaxation factor.
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_step")]
    pub step_size: StepSize,
    /// GMRES restart length; `None` means full GMRES.
    #[serde(default)]
    pub restart: Option<usize>,
    #[serde(default = "default_precondition")]
    pub precondition: Precondition,
    /// Replace A by (A + A^T)/2 before CG. Off by default: CG is run
    /// as-written even on perturbed nonsymmetric matrices.
    #[serde(default)]
    pub symmetrize_cg: bool,
}

fn default_tol() -> f64 {
    1e-8
}
fn default_omega() -> f64 {
    1.0
}
fn default_step() -> StepSize {
    StepSize::Auto
}
fn default_precondition() -> Precondition {
    Precondition::None
}

impl SolverConfig {
    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind,
            tol: default_tol(),
            max_iter: None,
            omega: default_omega(),
            step_size: default_step(),
            restart: None,
            precondition: Precondition::None,
            symmetrize_cg: false,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_step(mut self, step: StepSize) -> Self {
        self.step_size = step;
        self
    }

    pub fn with_precondition(mut self, p: Precondition) -> Self {
        self.precondition = p;
        self
    }

    pub fn resolved_max_iter(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(match self.kind {
            SolverKind::Gd => 100_000,
            _ => 10 * n,
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be > 0".into()));
        }
        if self.resolved_max_iter(n) < 1 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if self.kind == SolverKind::Sor && !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::InvalidConfig(format!("SOR omega {} outside (0, 2)", self.omega)));
        }
        Ok(())
    }
}

/// Outcome of one iterative solve. `residual_history[k]` is the true
/// residual ||b - A x^(k)||_2, starting from x^(0) = 0.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub w: Vec<f64>,
    pub residual_history: Vec<f64>,
    pub n_end: usize,
    pub converged: bool,
    pub breakdown: Option<String>,
}

impl SolveReport {
    pub fn solution(&self) -> Vect {
        Vect::from(self.w.clone())
    }
}

/// Direct least-squares via the normal equations A^T A w = A^T b, solved by
/// a pivoted factorization (no explicit inverse). Deliberately unguarded:
/// squaring the condition number is the method's defining weakness, and the
/// garbage solutions it produces on ill-conditioned input are part of what
/// the sweeps measure, so near-singular normal equations are not masked.
pub fn solve_nes(x: &Mat, y: &Vect) -> Result<Vect> {
    assert_eq!(x.rows(), y.len(), "solve_nes shape mismatch");
    let ata = x.transpose().matmul(x);
    let atb = x.tr_matvec(y);
    match crate::linalg::lu_factor_unguarded(&ata) {
        Ok(f) => Ok(f.solve(&atb)),
        Err(Error::SingularMatrix { .. }) => Err(Error::NumericallySingular),
        Err(other) => Err(other),
    }
}

/// Run the configured method with x^(0) = 0. NES and GD accept rectangular
/// systems (least squares); the other methods require a square matrix.
pub fn solve_iterative(a: &Mat, b: &Vect, cfg: &SolverConfig) -> Result<SolveReport> {
    assert_eq!(a.rows(), b.len(), "solve_iterative shape mismatch");
    if !a.is_square() && !matches!(cfg.kind, SolverKind::Nes | SolverKind::Gd) {
        return Err(Error::InvalidShape(format!(
            "{} requires a square matrix, got {}x{}",
            cfg.kind.name(),
            a.rows(),
            a.cols()
        )));
    }
    cfg.validate(a.rows())?;
    if cfg.precondition == Precondition::Ilu0 {
        return solve_preconditioned(a, b, cfg);
    }
    match cfg.kind {
        SolverKind::Nes => {
            // Direct method folded into the same report shape for sweeps.
            let w = solve_nes(a, b)?;
            let r0 = b.norm2();
            let r = b.sub(&a.matvec(&w)).norm2();
            Ok(SolveReport {
                w: w.data().to_vec(),
                residual_history: vec![r0, r],
                n_end: 1,
                converged: r <= cfg.tol * r0.max(f64::MIN_POSITIVE),
                breakdown: None,
            })
        }
        SolverKind::Jacobi => stationary::solve(a, b, cfg, StationaryKind::Jacobi, 1.0),
        SolverKind::GaussSeidel => stationary::solve(a, b, cfg, StationaryKind::GaussSeidel, 1.0),
        SolverKind::Sor => stationary::solve(a, b, cfg, StationaryKind::Sor, cfg.omega),
        SolverKind::Cg => krylov::cg(a, b, cfg, None),
        SolverKind::Gmres => krylov::gmres(a, b, cfg, None),
        SolverKind::Gd => gd::solve(a, b, cfg),
    }
}

/// Left-preconditioned Krylov solve with M = L~ U~ from ILU(0). Convergence
/// is judged on the true residual so reports stay comparable with
/// unpreconditioned runs.
pub fn solve_preconditioned(a: &Mat, b: &Vect, cfg: &SolverConfig) -> Result<SolveReport> {
    if cfg.precondition != Precondition::Ilu0 {
        return Err(Error::InvalidConfig("solve_preconditioned needs precondition = ILU0".into()));
    }
    if !matches!(cfg.kind, SolverKind::Gmres | SolverKind::Cg) {
        return Err(Error::InvalidConfig(format!(
            "ILU0 preconditioning supports GMRES and CG, not {}",
            cfg.kind.name()
        )));
    }
    let m = ilu0(a)?;
    match cfg.kind {
        SolverKind::Gmres => krylov::gmres(a, b, cfg, Some(&m)),
        SolverKind::Cg => krylov::cg(a, b, cfg, Some(&m)),
        _ => unreachable!(),
    }
}

/// Smoothness constant of f(w) = ||Aw - b||^2: L = 2 sigma_max(A)^2.
pub fn gd_smoothness(a: &Mat) -> f64 {
    let s = crate::linalg::opnorm2(a);
    2.0 * s * s
}
