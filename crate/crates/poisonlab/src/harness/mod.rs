//! Experiment orchestration: configuration, deterministic sweeps over
//! (epsilon x attack x solver x repeat) grids, bound-verification
//! campaigns, spectral diagnostics, and report aggregation.
//!
//! All commands are deterministic for a fixed config: grid cells may be
//! computed in parallel but results are merged in sorted key order, so
//! output bytes are schedule-independent.

mod svg;

pub use svg::render_polylines;

use crate::analysis::{
    cg_alignment, eigvec_condition, evaluate, stationary_iteration_matrix, verify_forward,
    EvalMetrics,
};
use crate::attacks::{
    attack_lp, attack_up, AttackKind, AttackOutcome, NormKind, OptimizerParams, PerturbBudget,
};
use crate::datagen::{gen_dense_regression, gen_sdd_square, RegressionTask};
use crate::error::{Error, Result};
use crate::linalg::spectral_radius;
use crate::rng::Rng;
use crate::solvers::{
    gd_smoothness, solve_iterative, Precondition, SolverConfig, SolverKind, StationaryKind,
    StepSize,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const METRICS_HEADER: &str =
    "epsilon,attack,solver,abs_err,rsd,sol_err_abs,sol_err_rel,kappa,n_end,converged";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorConfig {
    Dense {
        #[serde(default = "default_n_train")]
        n_train: usize,
        #[serde(default = "default_n_test")]
        n_test: usize,
        #[serde(default = "default_d")]
        d: usize,
        #[serde(default)]
        noise_std: f64,
    },
    Sdd {
        #[serde(default = "default_sdd_n")]
        n: usize,
        #[serde(default = "default_density")]
        density: f64,
    },
}

fn default_n_train() -> usize {
    6
}
fn default_n_test() -> usize {
    9
}
fn default_d() -> usize {
    3
}
fn default_sdd_n() -> usize {
    20
}
fn default_density() -> f64 {
    0.3
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::Sdd { n: default_sdd_n(), density: default_density() }
    }
}

impl GeneratorConfig {
    pub fn generate(&self, seed: u64) -> Result<RegressionTask> {
        let mut rng = Rng::new(seed);
        match *self {
            GeneratorConfig::Dense { n_train, n_test, d, noise_std } => {
                gen_dense_regression(&mut rng, n_train, n_test, d, noise_std)
            }
            GeneratorConfig::Sdd { n, density } => gen_sdd_square(&mut rng, n, density),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorConfig::Dense { .. } => "dense",
            GeneratorConfig::Sdd { .. } => "sdd",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetConfig {
    #[serde(default = "default_norm")]
    pub norm: String,
    #[serde(default)]
    pub symmetric: bool,
}

fn default_norm() -> String {
    "spectral".into()
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self { norm: default_norm(), symmetric: false }
    }
}

impl BudgetConfig {
    pub fn budget(&self, epsilon: f64) -> Result<PerturbBudget> {
        let norm = match self.norm.to_ascii_lowercase().as_str() {
            "spectral" => NormKind::Spectral,
            "frobenius" | "fro" => NormKind::Frobenius,
            other => {
                return Err(Error::InvalidConfig(format!("unknown budget norm '{other}'")))
            }
        };
        Ok(PerturbBudget { epsilon, norm, symmetric: self.symmetric })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub generator: GeneratorConfig,
    /// "lp", "up" or "none".
    #[serde(default = "default_attack")]
    pub attack: String,
    #[serde(default)]
    pub budget: BudgetConfig,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverConfig>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Significance level for the bound-verification t-tests.
    #[serde(default = "default_xi")]
    pub xi: f64,
    /// Emit minimal SVG line charts next to diagnostic CSVs.
    #[serde(default)]
    pub svg: bool,
}

fn default_seed() -> u64 {
    42
}
fn default_attack() -> String {
    "lp".into()
}
fn default_epsilons() -> Vec<f64> {
    vec![0.0, 0.4, 0.8, 1.2, 1.6, 2.0]
}
fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}
fn default_repeats() -> usize {
    20
}
fn default_xi() -> f64 {
    0.05
}
fn default_solvers() -> Vec<SolverConfig> {
    [
        SolverKind::Nes,
        SolverKind::Jacobi,
        SolverKind::GaussSeidel,
        SolverKind::Sor,
        SolverKind::Gd,
        SolverKind::Cg,
        SolverKind::Gmres,
    ]
    .into_iter()
    .map(SolverConfig::new)
    .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("default config")
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("epsilons must be non-empty".into()));
        }
        if self.epsilons.iter().any(|&e| !(e >= 0.0) || !e.is_finite()) {
            return Err(Error::InvalidConfig("epsilons must be finite and >= 0".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be >= 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidConfig("at least one solver required".into()));
        }
        for s in &self.solvers {
            s.validate(1)?;
        }
        AttackKind::parse(&self.attack)?;
        self.budget.budget(1.0)?;
        Ok(())
    }

    pub fn attack_kind(&self) -> AttackKind {
        AttackKind::parse(&self.attack).expect("validated attack")
    }
}

/// Build the rayon pool honoring POISONLAB_THREADS (0 or unset = default).
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("POISONLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("rayon pool")
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v > 0.0 {
        "1e308".into()
    } else {
        "-1e308".into()
    }
}

/// Run the configured attack on one task at one budget. Epsilon zero (or
/// attack "none") yields the zero perturbation.
pub fn run_attack(
    task: &RegressionTask,
    kind: AttackKind,
    budget: &PerturbBudget,
    opt: &OptimizerParams,
) -> Result<AttackOutcome> {
    if budget.epsilon == 0.0 || kind == AttackKind::None {
        let clean = task.y_test.sub(&task.x_test.matvec(&task.w_ref)).norm2();
        return Ok(AttackOutcome {
            delta: crate::linalg::Mat::zeros(task.x_train.rows(), task.x_train.cols()),
            objective_trace: vec![clean],
            iters: 0,
            grad_mode: crate::attacks::GradMode::Analytic,
        });
    }
    match kind {
        AttackKind::Lp => attack_lp(task, budget, opt),
        AttackKind::Up => attack_up(&task.x_train, budget, opt),
        AttackKind::None => unreachable!(),
    }
}

/// cmd synth: write the task bundle for the base seed.
pub fn cmd_synth(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let task = cfg.generator.generate(cfg.seed)?;
    let (n_train, n_test, d) = (task.x_train.rows(), task.x_test.rows(), task.x_train.cols());
    let meta = crate::io::TaskMeta {
        generator: cfg.generator.name().into(),
        seed: cfg.seed,
        n_train,
        n_test,
        d,
        params: serde_json::to_value(&cfg.generator)?,
    };
    crate::io::write_task_bundle(&cfg.outputs.join("task"), &task, &meta)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct CellRecord {
    epsilon: f64,
    repeat: usize,
    attack: String,
    iters: usize,
    grad_mode: String,
    objective_start: f64,
    objective_end: f64,
    delta_norm: f64,
}

/// cmd sweep: for each (epsilon, repeat) run the attack once, then evaluate
/// every solver; write metrics.csv, per-cell artifacts, residual histories
/// and a medians summary. Returns true when every row converged.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<bool> {
    cfg.validate()?;
    let kind = cfg.attack_kind();
    let opt = OptimizerParams::default();
    std::fs::create_dir_all(&cfg.outputs)?;

    let mut keys: Vec<(usize, usize)> = Vec::new();
    for ei in 0..cfg.epsilons.len() {
        for r in 0..cfg.repeats {
            keys.push((ei, r));
        }
    }

    type CellOut = ((usize, usize), Result<(CellRecord, String, Vec<(String, EvalMetrics, Vec<f64>)>)>);
    let pool = thread_pool();
    let mut cells: Vec<CellOut> = pool.install(|| {
        keys.par_iter()
            .map(|&(ei, r)| {
                let eps = cfg.epsilons[ei];
                let run = || -> Result<(CellRecord, String, Vec<(String, EvalMetrics, Vec<f64>)>)> {
                    let task = cfg.generator.generate(cfg.seed + r as u64)?;
                    let budget = cfg.budget.budget(eps)?;
                    let outcome = run_attack(&task, kind, &budget, &opt)?;
                    let record = CellRecord {
                        epsilon: eps,
                        repeat: r,
                        attack: kind.name().into(),
                        iters: outcome.iters,
                        grad_mode: format!("{:?}", outcome.grad_mode),
                        objective_start: outcome.objective_trace[0],
                        objective_end: *outcome.objective_trace.last().unwrap(),
                        delta_norm: budget.norm_of(&outcome.delta),
                    };
                    let delta_csv = crate::io::mat_to_csv(&outcome.delta);
                    let mut rows = Vec::new();
                    for scfg in &cfg.solvers {
                        let metrics = evaluate(&task, &outcome.delta, scfg);
                        let history = solve_iterative(
                            &task.x_train.add(&outcome.delta),
                            &task.y_train,
                            scfg,
                        )
                        .map(|rep| rep.residual_history)
                        .unwrap_or_default();
                        rows.push((scfg.kind.name().to_string(), metrics, history));
                    }
                    Ok((record, delta_csv, rows))
                };
                ((ei, r), run())
            })
            .collect()
    });
    cells.sort_by_key(|(k, _)| *k);

    let mut csv = String::from(METRICS_HEADER);
    csv.push('\n');
    let mut all_converged = true;
    let mut medians: std::collections::BTreeMap<(usize, String), Vec<&EvalMetrics>> =
        Default::default();

    for ((ei, r), out) in &cells {
        let eps = cfg.epsilons[*ei];
        match out {
            Ok((record, delta_csv, rows)) => {
                let cell_dir =
                    cfg.outputs.join("cells").join(format!("eps{ei}_rep{r}"));
                std::fs::create_dir_all(&cell_dir)?;
                std::fs::write(cell_dir.join("delta.csv"), delta_csv)?;
                std::fs::write(
                    cell_dir.join("attack.json"),
                    serde_json::to_string_pretty(record)?,
                )?;
                for (solver, metrics, history) in rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{},{},{}",
                        fmt_num(eps),
                        record.attack,
                        solver,
                        fmt_num(metrics.abs_err),
                        fmt_num(metrics.rsd),
                        fmt_num(metrics.sol_err_abs),
                        fmt_num(metrics.sol_err_rel),
                        fmt_num(metrics.kappa),
                        metrics.n_end,
                        metrics.converged
                    );
                    all_converged &= metrics.converged;
                    medians.entry((*ei, solver.clone())).or_default().push(metrics);
                    if *r == 0 && !history.is_empty() {
                        let mut hist_csv = String::from("iteration,residual\n");
                        for (i, h) in history.iter().enumerate() {
                            let _ = writeln!(hist_csv, "{i},{}", fmt_num(*h));
                        }
                        let dir = cfg.outputs.join("residuals");
                        std::fs::create_dir_all(&dir)?;
                        std::fs::write(
                            dir.join(format!("eps{ei}_{}_{solver}.csv", record.attack)),
                            hist_csv,
                        )?;
                    }
                }
            }
            Err(e) => {
                // a failed cell is recorded for every solver as non-convergence
                all_converged = false;
                for scfg in &cfg.solvers {
                    let _ = writeln!(
                        csv,
                        "{},{},{},0,0,0,0,0,{},false",
                        fmt_num(eps),
                        kind.name(),
                        scfg.kind.name(),
                        scfg.resolved_max_iter(1)
                    );
                }
                eprintln!("cell (eps={eps}, repeat={r}) failed: {e}");
            }
        }
    }
    std::fs::write(cfg.outputs.join("metrics.csv"), &csv)?;

    // medians summary
    let mut summary = serde_json::Map::new();
    for ((ei, solver), ms) in &medians {
        let key = format!("eps{}_{}", cfg.epsilons[*ei], solver);
        let med = |f: &dyn Fn(&EvalMetrics) -> f64| -> f64 {
            let mut v: Vec<f64> = ms.iter().map(|m| f(m)).collect();
            median(&mut v)
        };
        summary.insert(
            key,
            serde_json::json!({
                "abs_err": med(&|m| m.abs_err),
                "rsd": med(&|m| m.rsd),
                "sol_err_abs": med(&|m| m.sol_err_abs),
                "sol_err_rel": med(&|m| m.sol_err_rel),
                "kappa": med(&|m| m.kappa),
                "n_end": med(&|m| m.n_end as f64),
            }),
        );
    }
    std::fs::write(
        cfg.outputs.join("summary.json"),
        serde_json::to_string_pretty(&serde_json::Value::Object(summary))?,
    )?;
    Ok(all_converged)
}

pub fn median(v: &mut [f64]) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// cmd verify-bounds: square dense tasks (n = d), per-epsilon attack runs,
/// per-seed (error, bound) CSV and a t-test summary JSON.
pub fn cmd_verify_bounds(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let kind = cfg.attack_kind();
    std::fs::create_dir_all(&cfg.outputs)?;
    let mut summary = serde_json::Map::new();

    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        let tasks: Vec<RegressionTask> = (0..cfg.repeats)
            .map(|r| cfg.generator.generate(cfg.seed + r as u64))
            .collect::<Result<_>>()?;
        for t in &tasks {
            if !t.x_train.is_square() {
                return Err(Error::InvalidConfig(
                    "verify-bounds requires a square generator (n_train = d)".into(),
                ));
            }
        }
        let v = verify_forward(&tasks, kind, eps, cfg.xi)?;
        let mut csv = String::from("sol_err_rel,rel_bound,output_err,output_bound,holds\n");
        for s in &v.samples {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_num(s.sol_err_rel),
                fmt_num(s.rel_bound),
                fmt_num(s.output_err),
                fmt_num(s.output_bound),
                s.holds_rel && s.holds_output
            );
        }
        std::fs::write(cfg.outputs.join(format!("forward_eps{ei}.csv")), csv)?;
        summary.insert(
            format!("eps{eps}_{}", kind.name()),
            serde_json::json!({
                "epsilon": eps,
                "usable_samples": v.samples.len(),
                "excluded": v.excluded,
                "ttest": v.ttest,
                "all_hold": v.samples.iter().all(|s| s.holds_rel && s.holds_output),
            }),
        );
    }
    std::fs::write(
        cfg.outputs.join("ttest.json"),
        serde_json::to_string_pretty(&serde_json::Value::Object(summary))?,
    )?;
    Ok(())
}

/// cmd diagnose: spectral radii of stationary iteration matrices vs
/// epsilon, eigenvector conditioning and GMRES cost, CG alignments, a GD
/// learning-rate grid, and the ILU(0) preconditioning comparison.
pub fn cmd_diagnose(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let kind = cfg.attack_kind();
    let opt = OptimizerParams::default();
    std::fs::create_dir_all(&cfg.outputs)?;

    // per (epsilon, repeat): perturbed matrix diagnostics
    let pool = thread_pool();
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for ei in 0..cfg.epsilons.len() {
        for r in 0..cfg.repeats {
            keys.push((ei, r));
        }
    }
    type DiagRow = (f64, f64, f64, f64, f64, f64, f64, f64, f64);
    let mut rows: Vec<((usize, usize), Result<DiagRow>)> = pool.install(|| {
        keys.par_iter()
            .map(|&(ei, r)| {
                let eps = cfg.epsilons[ei];
                let run = || -> Result<DiagRow> {
                    let task = cfg.generator.generate(cfg.seed + r as u64)?;
                    let budget = cfg.budget.budget(eps)?;
                    let outcome = run_attack(&task, kind, &budget, &opt)?;
                    let xp = task.x_train.add(&outcome.delta);
                    let rho_j = spectral_radius(&stationary_iteration_matrix(
                        &xp,
                        StationaryKind::Jacobi,
                        1.0,
                    )?)?;
                    let rho_gs = spectral_radius(&stationary_iteration_matrix(
                        &xp,
                        StationaryKind::GaussSeidel,
                        1.0,
                    )?)?;
                    let rho_sor = spectral_radius(&stationary_iteration_matrix(
                        &xp,
                        StationaryKind::Sor,
                        1.1,
                    )?)?;
                    let kappa_v = eigvec_condition(&xp).unwrap_or(f64::INFINITY);
                    let gmres =
                        solve_iterative(&xp, &task.y_train, &SolverConfig::new(SolverKind::Gmres))?;
                    let gmres_ilu = solve_iterative(
                        &xp,
                        &task.y_train,
                        &SolverConfig::new(SolverKind::Gmres)
                            .with_precondition(Precondition::Ilu0),
                    )
                    .map(|rep| rep.n_end as f64)
                    .unwrap_or(f64::INFINITY);
                    // alignment diagnostics live on the symmetric part
                    let xps = xp.add(&xp.transpose()).scale(0.5);
                    let (a1, a5) = cg_alignment(&xps, &task.y_train, 5)?;
                    let l = gd_smoothness(&xp);
                    Ok((
                        rho_j,
                        rho_gs,
                        rho_sor,
                        kappa_v,
                        gmres.n_end as f64,
                        gmres_ilu,
                        a1,
                        a5,
                        l,
                    ))
                };
                ((ei, r), run())
            })
            .collect()
    });
    rows.sort_by_key(|(k, _)| *k);

    let mut radii = String::from("epsilon,rho_jacobi,rho_gauss_seidel,rho_sor\n");
    let mut eigen = String::from("epsilon,kappa_eigvec,gmres_n_end,smoothness\n");
    let mut align = String::from("epsilon,first_alignment,top5_alignment\n");
    let mut precond = String::from("epsilon,gmres_n_end,gmres_ilu_n_end\n");
    let mut radii_series: Vec<(f64, f64)> = Vec::new();
    let mut precond_series: (Vec<(f64, f64)>, Vec<(f64, f64)>) = (vec![], vec![]);

    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        let cell: Vec<&DiagRow> = rows
            .iter()
            .filter(|((e, _), res)| *e == ei && res.is_ok())
            .map(|(_, res)| res.as_ref().unwrap())
            .collect();
        if cell.is_empty() {
            continue;
        }
        let med = |f: &dyn Fn(&DiagRow) -> f64| -> f64 {
            let mut v: Vec<f64> = cell.iter().map(|d| f(d)).collect();
            median(&mut v)
        };
        let (rj, rgs, rsor) = (med(&|d| d.0), med(&|d| d.1), med(&|d| d.2));
        let _ = writeln!(radii, "{},{},{},{}", fmt_num(eps), fmt_num(rj), fmt_num(rgs), fmt_num(rsor));
        let _ = writeln!(
            eigen,
            "{},{},{},{}",
            fmt_num(eps),
            fmt_num(med(&|d| d.3)),
            fmt_num(med(&|d| d.4)),
            fmt_num(med(&|d| d.8))
        );
        let _ = writeln!(align, "{},{},{}", fmt_num(eps), fmt_num(med(&|d| d.6)), fmt_num(med(&|d| d.7)));
        let (g_plain, g_ilu) = (med(&|d| d.4), med(&|d| d.5));
        let _ = writeln!(precond, "{},{},{}", fmt_num(eps), fmt_num(g_plain), fmt_num(g_ilu));
        radii_series.push((eps, rj));
        precond_series.0.push((eps, g_plain));
        precond_series.1.push((eps, g_ilu));
    }
    std::fs::write(cfg.outputs.join("spectral_radius.csv"), &radii)?;
    std::fs::write(cfg.outputs.join("eigen.csv"), &eigen)?;
    std::fs::write(cfg.outputs.join("cg_alignment.csv"), &align)?;
    std::fs::write(cfg.outputs.join("preconditioning.csv"), &precond)?;

    // GD learning-rate grid on the clean system
    let task = cfg.generator.generate(cfg.seed)?;
    let l = gd_smoothness(&task.x_train);
    let mut grid = String::from("learning_rate,n_end,converged\n");
    for factor in [0.1, 0.25, 0.5, 0.75, 1.0, 1.25] {
        let lr = factor / l;
        let cfg_gd = SolverConfig::new(SolverKind::Gd).with_step(StepSize::Fixed(lr));
        let rep = solve_iterative(&task.x_train, &task.y_train, &cfg_gd)?;
        let _ = writeln!(grid, "{},{},{}", fmt_num(lr), rep.n_end, rep.converged);
    }
    std::fs::write(cfg.outputs.join("gd_learning_rate.csv"), &grid)?;

    if cfg.svg {
        std::fs::write(
            cfg.outputs.join("spectral_radius.svg"),
            render_polylines(
                "spectral radius vs epsilon",
                &[("rho_jacobi", radii_series.as_slice())],
            ),
        )?;
        std::fs::write(
            cfg.outputs.join("preconditioning.svg"),
            render_polylines(
                "GMRES iterations vs epsilon",
                &[
                    ("plain", precond_series.0.as_slice()),
                    ("ilu0", precond_series.1.as_slice()),
                ],
            ),
        )?;
    }
    Ok(())
}

/// cmd report: aggregate metrics.csv into a Markdown table of medians per
/// (epsilon, solver).
pub fn cmd_report(cfg: &ExperimentConfig) -> Result<()> {
    let path = cfg.outputs.join("metrics.csv");
    let text = std::fs::read_to_string(&path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty metrics.csv".into()))?;
    if header != METRICS_HEADER {
        return Err(Error::Parse(format!("unexpected metrics header: {header}")));
    }
    let mut groups: std::collections::BTreeMap<(String, String), Vec<(f64, f64, f64)>> =
        Default::default();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Parse(format!("bad metrics row: {line}")));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
        groups
            .entry((f[0].to_string(), f[2].to_string()))
            .or_default()
            .push((parse(f[3])?, parse(f[7])?, parse(f[8])?));
    }
    let mut md = String::from("# Sweep summary\n\n");
    md.push_str("| epsilon | solver | median abs_err | median kappa | median n_end |\n");
    md.push_str("|---|---|---|---|---|\n");
    for ((eps, solver), vals) in &groups {
        let mut a: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let mut k: Vec<f64> = vals.iter().map(|v| v.1).collect();
        let mut n: Vec<f64> = vals.iter().map(|v| v.2).collect();
        let _ = writeln!(
            md,
            "| {eps} | {solver} | {:.6} | {:.6} | {} |",
            median(&mut a),
            median(&mut k),
            median(&mut n)
        );
    }
    std::fs::write(cfg.outputs.join("report.md"), md)?;
    Ok(())
}
