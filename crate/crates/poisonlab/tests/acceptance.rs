//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Criteria mix deterministic bound checks, oracle
//! equivalence, and trend reproduction over seeded campaigns.

use poisonlab::analysis::{
    cg_alignment, evaluate, lp_divergence_bound, one_sided_t_test, stationary_constant,
    stationary_iteration_matrix, stationary_step, student_t_cdf, up_rate_bound, verify_forward,
    verify_lp_divergence, ForwardVerification,
};
use poisonlab::attacks::{
    attack_lp, attack_up, lp_hypergradient, project_ball, AttackKind, GradChoice, NormKind,
    OptimizerParams, PerturbBudget,
};
use poisonlab::datagen::{gen_dense_regression, gen_sdd_square, RegressionTask};
use poisonlab::harness::median;
use poisonlab::linalg::{
    cond2, eig_general, fnorm, lu_solve, opnorm2, spectral_radius, Mat, Vect,
};
use poisonlab::rng::Rng;
use poisonlab::solvers::{
    gd_smoothness, solve_iterative, Precondition, SolverConfig, SolverKind, StationaryKind,
    StepSize,
};
use std::sync::OnceLock;

fn report(criterion: usize, name: &str, ok: bool) {
    // write to the real stdout so the line survives the harness's output
    // capture and shows up in plain `cargo test` logs
    use std::io::Write;
    let mut out = std::io::stdout();
    let _ = writeln!(
        out,
        "ACCEPTANCE {criterion} ({name}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = out.flush();
}

// ---------------------------------------------------------------------------
// Criteria 1 + 2 share one forward-bound campaign:
// 100 seeds x eps in {0.01, 0.011, 0.012, 0.013}, n = d = 3, both attacks.
// ---------------------------------------------------------------------------

const FORWARD_EPSILONS: [f64; 4] = [0.01, 0.011, 0.012, 0.013];

fn forward_campaign() -> &'static Vec<(f64, AttackKind, ForwardVerification)> {
    static CAMPAIGN: OnceLock<Vec<(f64, AttackKind, ForwardVerification)>> = OnceLock::new();
    CAMPAIGN.get_or_init(|| {
        let tasks: Vec<RegressionTask> = (0..100u64)
            .map(|seed| {
                let mut rng = Rng::new(9000 + seed);
                gen_dense_regression(&mut rng, 3, 3, 3, 0.0).unwrap()
            })
            .collect();
        let mut out = Vec::new();
        for &eps in &FORWARD_EPSILONS {
            for attack in [AttackKind::Lp, AttackKind::Up] {
                let v = verify_forward(&tasks, attack, eps, 0.05).unwrap();
                out.push((eps, attack, v));
            }
        }
        out
    })
}

#[test]
fn criterion_1_forward_bound_deterministic() {
    let mut ok = true;
    let mut violations = 0usize;
    for (eps, attack, v) in forward_campaign() {
        for s in &v.samples {
            if !(s.holds_rel && s.holds_output) {
                violations += 1;
                eprintln!("violation at eps={eps} attack={attack:?}: {s:?}");
            }
        }
        if v.samples.len() + v.excluded != 100 {
            ok = false;
        }
    }
    ok &= violations == 0;
    report(1, "forward bound, zero violations", ok);
    assert!(ok, "{violations} forward-bound violations");
}

#[test]
fn criterion_2_forward_bound_ttest() {
    let mut ok = true;
    for (eps, attack, v) in forward_campaign() {
        if v.samples.len() < 30 {
            continue;
        }
        let t_ok = v.ttest.t_stat < 0.0;
        let p_ok = v.ttest.p_value < 0.05;
        if !(t_ok && p_ok) {
            eprintln!(
                "t-test cell eps={eps} attack={attack:?}: t={} p={}",
                v.ttest.t_stat, v.ttest.p_value
            );
            ok = false;
        }
    }
    report(2, "forward bound t-test, t<0 and p<0.05 per cell", ok);
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 3: dense 6x3 direct-solver trends.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_dense_nes_trends() {
    let epsilons = [0.01, 0.1, 0.5, 1.0];
    let opt = OptimizerParams::default();
    let nes = SolverConfig::new(SolverKind::Nes);
    // per epsilon: (kappas under up, kappas under lp); at eps=1.0 also errors
    let mut kappa_up: Vec<Vec<f64>> = vec![Vec::new(); epsilons.len()];
    let mut kappa_lp: Vec<Vec<f64>> = vec![Vec::new(); epsilons.len()];
    let mut err_up = Vec::new();
    let mut err_lp = Vec::new();

    for seed in 0..20u64 {
        let mut rng = Rng::new(300 + seed);
        let task = gen_dense_regression(&mut rng, 6, 9, 3, 0.0).unwrap();
        for (ei, &eps) in epsilons.iter().enumerate() {
            let budget = PerturbBudget::spectral(eps);
            let up = attack_up(&task.x_train, &budget, &opt).unwrap();
            let lp = attack_lp(&task, &budget, &opt).unwrap();
            let m_up = evaluate(&task, &up.delta, &nes);
            let m_lp = evaluate(&task, &lp.delta, &nes);
            kappa_up[ei].push(m_up.kappa);
            kappa_lp[ei].push(m_lp.kappa);
            if eps == 1.0 {
                err_up.push(m_up.abs_err);
                err_lp.push(m_lp.abs_err);
            }
        }
    }

    let mut ok = median(&mut err_up) > median(&mut err_lp);
    if !ok {
        eprintln!(
            "eps=1.0 NES error medians: up={} lp={}",
            median(&mut err_up),
            median(&mut err_lp)
        );
    }
    for ei in 0..epsilons.len() {
        let ku = median(&mut kappa_up[ei]);
        let kl = median(&mut kappa_lp[ei]);
        if ku <= kl {
            eprintln!("eps={} kappa medians: up={ku} lp={kl}", epsilons[ei]);
            ok = false;
        }
    }
    report(3, "dense direct-solver trends (error and kappa, UP vs LP)", ok);
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 4: SDD n=20 iterative-solver trends.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_sdd_iterative_trends() {
    let epsilons: Vec<f64> = (0..=5).map(|i| i as f64 * 0.4).collect();
    let opt = OptimizerParams::default();
    let solvers = [
        SolverConfig::new(SolverKind::Jacobi),
        SolverConfig::new(SolverKind::GaussSeidel),
        SolverConfig::new(SolverKind::Sor).with_omega(1.1),
        SolverConfig::new(SolverKind::Gd),
        SolverConfig::new(SolverKind::Gmres),
    ];
    let attacks = [AttackKind::Lp, AttackKind::Up];
    // [attack][eps][solver] -> per-seed vectors
    let mut abs_err = vec![vec![vec![Vec::new(); solvers.len()]; epsilons.len()]; 2];
    let mut n_end = vec![vec![vec![Vec::new(); solvers.len()]; epsilons.len()]; 2];

    for seed in 0..20u64 {
        let mut rng = Rng::new(400 + seed);
        let task = gen_sdd_square(&mut rng, 20, 0.3).unwrap();
        for (ai, &attack) in attacks.iter().enumerate() {
            for (ei, &eps) in epsilons.iter().enumerate() {
                let delta = if eps == 0.0 {
                    Mat::zeros(20, 20)
                } else {
                    // symmetric deltas keep the poisoned system in the same
                    // symmetric family the iterative methods are built for
                    let budget = PerturbBudget::spectral(eps).symmetric();
                    match attack {
                        AttackKind::Lp => attack_lp(&task, &budget, &opt).unwrap().delta,
                        AttackKind::Up => {
                            attack_up(&task.x_train, &budget, &opt).unwrap().delta
                        }
                        AttackKind::None => unreachable!(),
                    }
                };
                for (si, cfg) in solvers.iter().enumerate() {
                    let m = evaluate(&task, &delta, cfg);
                    let err = if m.abs_err.is_finite() { m.abs_err } else { f64::MAX };
                    abs_err[ai][ei][si].push(err);
                    n_end[ai][ei][si].push(m.n_end as f64);
                }
            }
        }
    }

    let last = epsilons.len() - 1;
    let mut ok = true;
    // (a) median test error increases from eps=0 to eps=2.0 under both attacks
    for ai in 0..2 {
        for si in 0..solvers.len() {
            let e0 = median(&mut abs_err[ai][0][si].clone());
            let e2 = median(&mut abs_err[ai][last][si].clone());
            if !(e2 > e0) {
                eprintln!(
                    "(a) attack={:?} solver={}: err eps0={e0} eps2={e2}",
                    attacks[ai],
                    solvers[si].kind.name()
                );
                ok = false;
            }
        }
    }
    // (b) LP error > UP error at eps >= 0.8 (system-level error: GMRES row)
    let gmres_idx = 4;
    for (ei, &eps) in epsilons.iter().enumerate() {
        if eps < 0.8 {
            continue;
        }
        let lp = median(&mut abs_err[0][ei][gmres_idx].clone());
        let up = median(&mut abs_err[1][ei][gmres_idx].clone());
        if !(lp > up) {
            eprintln!("(b) eps={eps}: lp median {lp} <= up median {up}");
            ok = false;
        }
    }
    // (c) median n_end at eps=2.0 exceeds clean n_end for Jacobi/GS/SOR/GD
    for ai in 0..2 {
        for si in 0..4 {
            let clean = median(&mut n_end[ai][0][si].clone());
            let poisoned = median(&mut n_end[ai][last][si].clone());
            if !(poisoned > clean) {
                eprintln!(
                    "(c) attack={:?} solver={}: n_end clean={clean} eps2={poisoned}",
                    attacks[ai],
                    solvers[si].kind.name()
                );
                ok = false;
            }
        }
    }
    // (d) GMRES median n_end changes by <= 2 over the whole range
    for ai in 0..2 {
        let meds: Vec<f64> = (0..epsilons.len())
            .map(|ei| median(&mut n_end[ai][ei][gmres_idx].clone()))
            .collect();
        let lo = meds.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = meds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > 2.0 {
            eprintln!("(d) attack={:?}: gmres n_end medians {meds:?}", attacks[ai]);
            ok = false;
        }
    }
    report(4, "sdd iterative trends (error, LP>UP, slowdown, gmres stability)", ok);
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 5: GD suboptimality envelopes, clean and UP-perturbed.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_gd_envelopes() {
    let mut violations = 0usize;
    let opt = OptimizerParams::default();
    for seed in 0..100u64 {
        let mut rng = Rng::new(500 + seed);
        let task = gen_sdd_square(&mut rng, 8, 0.4).unwrap();
        let a = &task.x_train;
        let b = &task.y_train;
        let l = gd_smoothness(a);
        let gamma = 1.0 / l;
        let x_star = lu_solve(a, b).unwrap();
        let c = x_star.norm2().powi(2); // ||x0 - x*||^2 with x0 = 0

        // clean envelope: min_{t<=T} f(x_t) <= C / (gamma (2 - gamma L) T)
        let cfg = SolverConfig::new(SolverKind::Gd)
            .with_step(StepSize::Fixed(gamma))
            .with_max_iter(2000);
        let rep = solve_iterative(a, b, &cfg).unwrap();
        let (bound, _) = up_rate_bound(c, gamma, 1.0, l, 1e-3).unwrap();
        let mut best = f64::INFINITY;
        for (t, r) in rep.residual_history.iter().enumerate().skip(1) {
            best = best.min(r * r);
            if best > bound.at(t as f64) * (1.0 + 1e-9) {
                violations += 1;
                eprintln!("clean envelope violated at seed {seed}, t={t}");
                break;
            }
        }

        // UP-perturbed envelope with measured alpha and the same step
        let budget = PerturbBudget::spectral(0.3);
        let up = attack_up(a, &budget, &opt).unwrap();
        let ap = a.add(&up.delta);
        let alpha = opnorm2(&ap) / opnorm2(a);
        let Ok(xp_star) = lu_solve(&ap, b) else { continue };
        let cp = xp_star.norm2().powi(2);
        let Ok((pbound, _)) = up_rate_bound(cp, gamma, alpha.max(1.0), l, 1e-3) else {
            continue;
        };
        let repp = solve_iterative(&ap, b, &cfg).unwrap();
        let mut bestp = f64::INFINITY;
        for (t, r) in repp.residual_history.iter().enumerate().skip(1) {
            bestp = bestp.min(r * r);
            if bestp > pbound.at(t as f64) * (1.0 + 1e-9) {
                violations += 1;
                eprintln!("perturbed envelope violated at seed {seed}, t={t}, alpha={alpha}");
                break;
            }
        }
    }
    let ok = violations == 0;
    report(5, "gd rate envelopes, clean and alpha-adjusted", ok);
    assert!(ok, "{violations} envelope violations");
}

// ---------------------------------------------------------------------------
// Criterion 6: solution-divergence lower bound on constructed instances.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_divergence_bound_constructions() {
    let mut ok = true;
    let mut rng = Rng::new(600);
    let mut built = 0usize;
    while built < 200 {
        let n = 2 + (rng.next_u64() % 5) as usize; // 2..=6
        let mut x = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] = rng.normal();
            }
            x[(i, i)] += 2.0 * n as f64; // keep X well away from singular
        }
        let w_star = Vect::from((0..n).map(|_| rng.normal()).collect::<Vec<_>>());
        let y = x.matvec(&w_star);
        let eps_target = 0.01 + 0.5 * rng.uniform();
        let mut dx = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                dx[(i, j)] = rng.normal();
            }
        }
        let dx = dx.scale(eps_target / opnorm2(&dx));
        let xp = x.add(&dx);

        // scale w' down until the bound's boundedness hypothesis holds:
        // ||w'|| <= eta ||X^-1|| / (1 + eps ||X^-1||) with eta = ||(X+dX)w' - y||
        let dir = Vect::from((0..n).map(|_| rng.normal()).collect::<Vec<_>>());
        let dir = dir.scale(1.0 / dir.norm2());
        let inv = poisonlab::linalg::inv_norm2(&x).unwrap();
        let mut t = 0.5 * w_star.norm2();
        let mut w_prime = None;
        for _ in 0..60 {
            let cand = dir.scale(t);
            let eta = xp.matvec(&cand).sub(&y).norm2();
            if cand.norm2() <= eta * inv / (1.0 + eps_target * inv) {
                w_prime = Some(cand);
                break;
            }
            t *= 0.5;
        }
        let Some(w_prime) = w_prime else { continue };
        let dy = xp.matvec(&w_prime).sub(&y);
        let rep = verify_lp_divergence(&x, &dx, &dy, &w_star, &w_prime).unwrap();
        if !(rep.precondition_ok && rep.holds) {
            eprintln!("divergence bound failed: {rep:?}");
            ok = false;
        }
        built += 1;
    }
    report(6, "divergence lower bound on 200 constructed instances", ok);
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 7: oracle equivalence.
// ---------------------------------------------------------------------------

/// Characteristic polynomial coefficients by Faddeev-LeVerrier:
/// p(s) = s^n + c[1] s^(n-1) + ... + c[n].
fn char_poly(a: &Mat) -> Vec<f64> {
    let n = a.rows();
    let mut c = vec![1.0];
    let mut m = Mat::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut am = a.matmul(&m);
        for i in 0..n {
            am[(i, i)] += c[k - 1];
        }
        m = am;
        let tr: f64 = (0..n).map(|i| a.matmul(&m)[(i, i)]).sum();
        c.push(-tr / k as f64);
    }
    c
}

/// Durand-Kerner root finder on a monic polynomial with real coefficients.
fn durand_kerner(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let n = coeffs.len() - 1;
    let eval = |zr: f64, zi: f64| -> (f64, f64) {
        let (mut pr, mut pi) = (0.0, 0.0);
        for &c in coeffs {
            let nr = pr * zr - pi * zi + c;
            let ni = pr * zi + pi * zr;
            pr = nr;
            pi = ni;
        }
        (pr, pi)
    };
    // distinct complex starting points on a non-real ray
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (0.9 * ang.cos(), 0.9 * ang.sin())
        })
        .collect();
    for _ in 0..500 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let (pr, pi) = eval(roots[i].0, roots[i].1);
            let (mut dr, mut di) = (1.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let ar = roots[i].0 - roots[j].0;
                let ai = roots[i].1 - roots[j].1;
                let nr = dr * ar - di * ai;
                let ni = dr * ai + di * ar;
                dr = nr;
                di = ni;
            }
            let denom = dr * dr + di * di;
            if denom == 0.0 {
                continue;
            }
            let qr = (pr * dr + pi * di) / denom;
            let qi = (pi * dr - pr * di) / denom;
            roots[i].0 -= qr;
            roots[i].1 -= qi;
            shift = shift.max((qr * qr + qi * qi).sqrt());
        }
        if shift < 1e-14 {
            break;
        }
    }
    roots
}

/// Greedy nearest-neighbour pairing distance between two spectra. Sorting
/// cannot pair conjugate pairs reliably when real parts differ in the last
/// ulp, so match each value to its closest unused counterpart instead.
fn spectra_distance(got: &[(f64, f64)], want: &[(f64, f64)]) -> f64 {
    let mut used = vec![false; want.len()];
    let mut worst = 0.0f64;
    for g in got {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, w) in want.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = ((g.0 - w.0).powi(2) + (g.1 - w.1).powi(2)).sqrt();
            if d < best {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}

#[test]
fn criterion_7_oracle_equivalence() {
    let mut ok = true;

    // (i) iterative solvers vs lu_solve on 100 SDD systems
    let solvers = [
        SolverConfig::new(SolverKind::Jacobi),
        SolverConfig::new(SolverKind::GaussSeidel),
        SolverConfig::new(SolverKind::Sor).with_omega(1.2),
        SolverConfig::new(SolverKind::Gd),
        SolverConfig::new(SolverKind::Cg),
        SolverConfig::new(SolverKind::Gmres),
    ];
    for seed in 0..100u64 {
        let mut rng = Rng::new(700 + seed);
        let task = gen_sdd_square(&mut rng, 15, 0.3).unwrap();
        let oracle = lu_solve(&task.x_train, &task.y_train).unwrap();
        for cfg in &solvers {
            let rep = solve_iterative(&task.x_train, &task.y_train, cfg).unwrap();
            let gap = rep.solution().sub(&oracle).norm2();
            if !rep.converged || gap > 100.0 * cfg.tol * oracle.norm2().max(1.0) {
                eprintln!(
                    "solver {} seed {seed}: converged={} gap={gap}",
                    cfg.kind.name(),
                    rep.converged
                );
                ok = false;
            }
        }
    }

    // (ii) eig_general vs characteristic-polynomial oracle, n <= 4
    let mut rng = Rng::new(710);
    for trial in 0..60 {
        let n = 2 + (trial % 3); // 2, 3, 4
        let data: Vec<f64> = (0..n * n).map(|_| rng.normal()).collect();
        let a = Mat::new(n, n, data).unwrap();
        let dec = eig_general(&a).unwrap();
        let got: Vec<(f64, f64)> = dec.values.clone();
        let want = durand_kerner(&char_poly(&a));
        let scale = opnorm2(&a).max(1.0);
        let d = spectra_distance(&got, &want);
        if d > 1e-7 * scale {
            eprintln!("eig mismatch trial {trial}: {got:?} vs {want:?}");
            ok = false;
        }
    }

    // (iii) analytic hypergradient vs central differences, square + rect
    let fd_check = |task: &RegressionTask, delta: &Mat| -> bool {
        let analytic = lp_hypergradient(task, delta).unwrap();
        let h = 1e-6;
        let obj = |d: &Mat| {
            let w = poisonlab::attacks::inner_solve(&task.x_train.add(d), &task.y_train)
                .unwrap();
            task.y_test.sub(&task.x_test.matvec(&w)).norm2()
        };
        let mut fd = Mat::zeros(delta.rows(), delta.cols());
        for i in 0..delta.rows() {
            for j in 0..delta.cols() {
                let mut p = delta.clone();
                p[(i, j)] += h;
                let mut m = delta.clone();
                m[(i, j)] -= h;
                fd[(i, j)] = (obj(&p) - obj(&m)) / (2.0 * h);
            }
        }
        fnorm(&analytic.sub(&fd)) <= 1e-4 * fnorm(&fd).max(1e-12)
    };
    let mut rng = Rng::new(720);
    for _ in 0..10 {
        let rect = gen_dense_regression(&mut rng, 6, 9, 3, 0.0).unwrap();
        let d_rect =
            Mat::new(6, 3, (0..18).map(|_| 0.05 * rng.normal()).collect()).unwrap();
        let square = gen_dense_regression(&mut rng, 3, 3, 3, 0.0).unwrap();
        let d_sq = Mat::new(3, 3, (0..9).map(|_| 0.02 * rng.normal()).collect()).unwrap();
        if !fd_check(&rect, &d_rect) || !fd_check(&square, &d_sq) {
            eprintln!("hypergradient mismatch");
            ok = false;
        }
    }

    // (iv) t CDF vs numerical integration (Simpson)
    for nu in [2.0, 5.0, 10.0, 99.0] {
        for t in [-3.0, -1.2, 0.4, 2.2] {
            let got = student_t_cdf(t, nu);
            let want = t_cdf_simpson(t, nu);
            if (got - want).abs() > 1e-6 {
                eprintln!("t cdf mismatch nu={nu} t={t}: {got} vs {want}");
                ok = false;
            }
        }
    }

    report(7, "oracle equivalence (solvers, eig, hypergradient, t cdf)", ok);
    assert!(ok);
}

fn t_cdf_simpson(t: f64, nu: f64) -> f64 {
    let ln_gamma = |x: f64| -> f64 {
        // Stirling series with shift, accurate enough for the oracle
        let mut x = x;
        let mut acc = 0.0;
        while x < 10.0 {
            acc -= x.ln();
            x += 1.0;
        }
        acc + 0.5 * ((2.0 * std::f64::consts::PI).ln() - x.ln())
            + x * (x.ln() - 1.0)
            + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    };
    let norm = (ln_gamma((nu + 1.0) / 2.0)
        - ln_gamma(nu / 2.0)
        - 0.5 * (nu * std::f64::consts::PI).ln())
    .exp();
    let density = |u: f64| norm * (1.0 + u * u / nu).powf(-(nu + 1.0) / 2.0);
    let steps = 40_000usize;
    let hi = t.abs();
    let h = hi / steps as f64;
    let mut s = density(0.0) + density(hi);
    for i in 1..steps {
        s += density(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half = s * h / 3.0;
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

// ---------------------------------------------------------------------------
// Criterion 8: diagnostics consistency.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_diagnostics_consistency() {
    let mut ok = true;
    let mut rng = Rng::new(800);

    // (i) explicit stationary step == T x + c; (ii) rho(T) < 1 on SDD
    for _ in 0..30 {
        let task = gen_sdd_square(&mut rng, 12, 0.3).unwrap();
        let x0 = Vect::from((0..12).map(|_| rng.normal()).collect::<Vec<_>>());
        for (kind, omega) in [
            (StationaryKind::Jacobi, 1.0),
            (StationaryKind::GaussSeidel, 1.0),
            (StationaryKind::Sor, 1.3),
        ] {
            let t = stationary_iteration_matrix(&task.x_train, kind, omega).unwrap();
            let c = stationary_constant(&task.x_train, &task.y_train, kind, omega).unwrap();
            let matrix_form = t.matvec(&x0).add(&c);
            let explicit = stationary_step(&task.x_train, &task.y_train, &x0, kind, omega);
            if matrix_form.sub(&explicit).norm2() > 1e-12 * (1.0 + x0.norm2()) {
                eprintln!("step mismatch for {kind:?}");
                ok = false;
            }
            let rho = spectral_radius(&t).unwrap();
            if rho >= 1.0 {
                eprintln!("rho({kind:?}) = {rho} >= 1 on SDD");
                ok = false;
            }
        }

        // (iii) Parseval
        let r0 = Vect::from((0..12).map(|_| rng.normal()).collect::<Vec<_>>());
        let (_, total) = cg_alignment(&task.x_train, &r0, 12).unwrap();
        let parseval = r0.norm2().powi(2);
        if (total - parseval).abs() > 1e-9 * parseval.max(1.0) {
            eprintln!("Parseval failed: {total} vs {parseval}");
            ok = false;
        }
    }

    // (iv) ILU(0)-preconditioned GMRES beats plain GMRES at eps = 2.0
    let opt = OptimizerParams::default();
    let mut plain = Vec::new();
    let mut ilu = Vec::new();
    for seed in 0..20u64 {
        let mut rng = Rng::new(820 + seed);
        let task = gen_sdd_square(&mut rng, 20, 0.3).unwrap();
        let budget = PerturbBudget::spectral(2.0);
        let delta = attack_lp(&task, &budget, &opt).unwrap().delta;
        let xp = task.x_train.add(&delta);
        let p = solve_iterative(&xp, &task.y_train, &SolverConfig::new(SolverKind::Gmres))
            .unwrap();
        let q = solve_iterative(
            &xp,
            &task.y_train,
            &SolverConfig::new(SolverKind::Gmres).with_precondition(Precondition::Ilu0),
        )
        .unwrap();
        plain.push(p.n_end as f64);
        ilu.push(q.n_end as f64);
    }
    if !(median(&mut ilu) < median(&mut plain)) {
        eprintln!(
            "preconditioning did not help: ilu median {} vs plain {}",
            median(&mut ilu),
            median(&mut plain)
        );
        ok = false;
    }

    report(8, "diagnostics consistency (step forms, contraction, Parseval, ilu)", ok);
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Smaller cross-checks used by the criteria above stay honest.
// ---------------------------------------------------------------------------

#[test]
fn supporting_invariants() {
    // spectral projection feasibility at the exact budget
    let mut rng = Rng::new(900);
    for _ in 0..20 {
        let d = Mat::new(4, 4, (0..16).map(|_| rng.normal()).collect()).unwrap();
        let b = PerturbBudget { epsilon: 0.3, norm: NormKind::Spectral, symmetric: false };
        let p = project_ball(&d, &b);
        assert!(opnorm2(&p) <= 0.3 * (1.0 + 1e-9));
    }

    // divergence bound formula spot value
    let b = lp_divergence_bound(&Mat::identity(3), 0.1, 1.0).unwrap();
    assert!((b - 1.0 / 1.1).abs() < 1e-12);

    // LP attacks keep the feasibility invariant under the analytic path
    let mut rng = Rng::new(901);
    let task = gen_dense_regression(&mut rng, 6, 9, 3, 0.0).unwrap();
    let mut opt = OptimizerParams::default();
    opt.grad = GradChoice::Analytic;
    let out = attack_lp(&task, &PerturbBudget::spectral(0.5), &opt).unwrap();
    assert!(opnorm2(&out.delta) <= 0.5 * (1.0 + 1e-9));

    // kappa grows monotonically along the UP trace on a fixed matrix
    let x = Mat::from_rows(&[&[3.0, 0.4], &[0.1, 1.5]]).unwrap();
    let out = attack_up(&x, &PerturbBudget::spectral(0.4), &OptimizerParams::default()).unwrap();
    for w in out.objective_trace.windows(2) {
        assert!(w[1] >= w[0]);
    }
    assert!(cond2(&x.add(&out.delta)).unwrap() >= cond2(&x).unwrap());

    // the t-test rejects for clearly negative samples
    let rep = one_sided_t_test(&[-0.5, -0.4, -0.6, -0.55, -0.45], 0.05).unwrap();
    assert!(rep.reject_null);
}
