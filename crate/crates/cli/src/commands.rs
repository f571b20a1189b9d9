use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stokesheat::control::SweepAxis;
use stokesheat::hilbert::{gram_matrix, rayleigh_matrix, trace_gramian};
use stokesheat::spectral::{assemble_basis_with, mode_residuals, Phase};
use stokesheat::specineq::SampleGrid;
use stokesheat::{
    augmented_field, cost_and_constant_fit, load_basis, make_schedule, obs_constant, obs_gramian, oracle_eigs,
    residual_augmented, run_lr, save_basis, spec_ineq_report, stage_gramian, EigenBasis, EigenMode, Error,
    StateVector,
};

use crate::config::RunConfig;
use crate::output::{num, Sink, Table};

/// Why a command did not succeed; maps onto the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or usage (exit 2).
    Usage(String),
    /// Numerical or acceptance failure (exit 1).
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

fn from_core(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(m) | Error::Configuration(m) => Failure::Usage(m),
        Error::IncompleteBasis { .. } => Failure::Numerical(format!("{e}; set basis.k_max higher (or omit it)")),
        other => Failure::Numerical(other.to_string()),
    }
}

fn io_failure(what: &str) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Numerical(format!("cannot write {what}: {e}"))
}

pub type Outcome = Result<(), Failure>;

fn sink(cfg: &RunConfig) -> Result<Sink, Failure> {
    Sink::new(&cfg.io.out_dir, cfg.io.format)
        .map_err(|e| Failure::Usage(format!("io.out_dir: cannot create {}: {e}", cfg.io.out_dir.display())))
}

/// Loads the cached basis when it matches the configuration, otherwise builds
/// (and caches) a fresh one. Unreadable caches are rebuilt with a warning.
pub fn obtain_basis(cfg: &RunConfig) -> Result<EigenBasis, Failure> {
    let settings = cfg.basis.tolerances.settings();
    let (lambda_max, k_max) = (cfg.lambda_max(), cfg.k_max());
    if let Some(path) = &cfg.io.cache_path {
        if path.exists() {
            match load_basis(path) {
                Ok(b) if b.cutoff == lambda_max && b.k_range == k_max && b.metadata.settings == settings => {
                    eprintln!("loaded basis from {}", path.display());
                    return Ok(b);
                }
                Ok(_) => eprintln!("warning: cache {} was built with other parameters; rebuilding", path.display()),
                Err(e) => eprintln!("warning: cache {} is unusable ({e}); rebuilding", path.display()),
            }
        }
    }
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let basis = assemble_basis_with(lambda_max, k_max, &settings, now).map_err(from_core)?;
    if let Some(path) = &cfg.io.cache_path {
        if let Err(e) = save_basis(&basis, path) {
            eprintln!("warning: could not write cache {}: {e}", path.display());
        }
    }
    Ok(basis)
}

fn phase_label(m: &EigenMode) -> &'static str {
    match m.phase {
        None => "-",
        Some(Phase::Cosine) => "cos",
        Some(Phase::Sine) => "sin",
    }
}

#[derive(Serialize)]
struct ModeRow {
    k: u32,
    n: u32,
    phase: &'static str,
    lambda: f64,
}

#[derive(Serialize)]
struct Check {
    check: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn check_table(name: &'static str, checks: &[Check]) -> Table {
    let mut t = Table::new(name, 1, &["check", "value", "tolerance", "pass"]);
    for c in checks {
        t.push(vec![c.check.into(), num(c.value), num(c.tolerance), c.pass.to_string()]);
    }
    t
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("{:<28} {:>24}  (tol {:e})  {}", c.check, num(c.value), c.tolerance, if c.pass { "ok" } else { "FAILED" });
    }
}

fn orthonormality_checks(b: &EigenBasis) -> Vec<Check> {
    let n = b.len();
    let gram = (gram_matrix(b) - nalgebra_identity(n)).amax();
    let r = rayleigh_matrix(b);
    let lam = b.lambdas();
    let mut rq = 0.0f64;
    for j in 0..n {
        for l in 0..n {
            let target = if j == l { -lam[j] } else { 0.0 };
            rq = rq.max((r[(j, l)] - target).abs() / (lam[j] * lam[l]).sqrt());
        }
    }
    let parseval = (obs_gramian(b, &stokesheat::Rect::full_domain()).m + trace_gramian(b) - nalgebra_identity(n)).amax();
    let residual = b.modes.iter().filter(|m| m.k > 0).map(|m| mode_residuals(m, 16, 17).max()).fold(0.0, f64::max);
    vec![
        Check { check: "gram_identity", value: gram, tolerance: 1e-8, pass: gram <= 1e-8 },
        Check { check: "rayleigh_diagonal", value: rq, tolerance: 1e-6, pass: rq <= 1e-6 },
        Check { check: "parseval_split", value: parseval, tolerance: 1e-8, pass: parseval <= 1e-8 },
        Check { check: "mode_equation_residual", value: residual, tolerance: 1e-8, pass: residual <= 1e-8 },
    ]
}

fn nalgebra_identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

pub fn cmd_eigens(cfg: &RunConfig) -> Outcome {
    let out = sink(cfg)?;
    let b = obtain_basis(cfg)?;
    let mut modes = Table::new("modes", 1, &["k", "n", "phase", "lambda"]);
    let mut rows = Vec::with_capacity(b.len());
    for m in &b.modes {
        modes.push(vec![m.k.to_string(), m.n.to_string(), phase_label(m).into(), num(m.lambda)]);
        rows.push(ModeRow { k: m.k, n: m.n, phase: phase_label(m), lambda: m.lambda });
    }
    out.emit("modes", &modes, &rows).map_err(io_failure("modes"))?;
    let checks = orthonormality_checks(&b);
    out.emit("orthonormality", &check_table("orthonormality", &checks), &checks).map_err(io_failure("orthonormality"))?;
    println!("{} modes with lambda <= {} (k <= {})", b.len(), b.cutoff, b.k_range);
    print_checks(&checks);
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Numerical("basis invariants failed".into()))
    }
}

fn check_lambda_list(cfg: &RunConfig, min_len: usize) -> Outcome {
    let list = &cfg.sweeps.lambda_list;
    if list.is_empty() {
        return Err(Failure::Usage("sweeps.Lambda_list: must not be empty".into()));
    }
    if list.len() < min_len {
        return Err(Failure::Usage(format!("sweeps.Lambda_list: need at least {min_len} cutoffs, got {}", list.len())));
    }
    if let Some((i, l)) = list.iter().enumerate().find(|(_, &l)| l > cfg.lambda_max()) {
        return Err(Failure::Usage(format!(
            "sweeps.Lambda_list[{i}]: {l} exceeds basis.Lambda_max = {}",
            cfg.lambda_max()
        )));
    }
    Ok(())
}

pub fn cmd_specineq(cfg: &RunConfig) -> Outcome {
    check_lambda_list(cfg, 3)?;
    let out = sink(cfg)?;
    let b = obtain_basis(cfg)?;
    let report = spec_ineq_report(&b, &cfg.sweeps.lambda_list, &cfg.rect(), &cfg.kernel()).map_err(from_core)?;
    let mut t = Table::new(
        "specineq",
        1,
        &["Lambda", "dim", "min_eig", "implied_constant", "cosh_lower_bound", "trace", "violation"],
    );
    for r in &report.records {
        t.push(vec![
            num(r.lambda),
            r.dim.to_string(),
            num(r.min_eig),
            num(r.implied_constant),
            num(r.cosh_lower_bound),
            num(r.trace),
            r.violation.to_string(),
        ]);
        println!("Lambda {:>10}  dim {:>5}  min-eig {}", r.lambda, r.dim, num(r.min_eig));
    }
    out.emit("specineq", &t, &report.records).map_err(io_failure("specineq"))?;
    let mut f = Table::new("specineq-fit", 1, &["slope", "intercept", "r_squared"]);
    if let Some(fit) = &report.fit {
        f.push(vec![num(fit.slope), num(fit.intercept), num(fit.r_squared)]);
        println!("fit -log(min-eig) = {:.6} sqrt(Lambda) + {:.6}, R^2 = {:.6}", fit.slope, fit.intercept, fit.r_squared);
    }
    out.emit("specineq_fit", &f, &report.fit).map_err(io_failure("specineq_fit"))?;
    if report.all_positive() {
        Ok(())
    } else {
        Err(Failure::Numerical("min-eig(K) <= 0 for some cutoff".into()))
    }
}

/// Largest `2 λ T` the observability computation accepts.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Serialize)]
struct ObserveRow {
    lambda: f64,
    horizon: f64,
    dim: usize,
    c_obs: f64,
    scaled_min_eig: f64,
}

#[derive(Serialize)]
struct FitRow {
    axis: &'static str,
    fixed: f64,
    points: usize,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    monotone: bool,
}

pub fn cmd_observe(cfg: &RunConfig) -> Outcome {
    check_lambda_list(cfg, 1)?;
    let ts = &cfg.sweeps.t_list;
    if ts.is_empty() {
        return Err(Failure::Usage("sweeps.T_list: must not be empty".into()));
    }
    let lmax = cfg.sweeps.lambda_list.iter().cloned().fold(0.0, f64::max);
    if let Some((i, t)) = ts.iter().enumerate().find(|(_, &t)| 2.0 * lmax * t > MAX_EXPONENT) {
        return Err(Failure::Usage(format!(
            "sweeps.T_list[{i}]: 2 Lambda T = {} exceeds {MAX_EXPONENT} for Lambda = {lmax}",
            2.0 * lmax * t
        )));
    }
    let out = sink(cfg)?;
    let b = obtain_basis(cfg)?;
    let rect = cfg.rect();
    let mut rows = Vec::new();
    for &lambda in &cfg.sweeps.lambda_list {
        for &t in ts {
            match obs_constant(&b, lambda, t, &rect) {
                Ok(e) => rows.push(ObserveRow {
                    lambda,
                    horizon: t,
                    dim: e.dim,
                    c_obs: e.c_obs,
                    scaled_min_eig: e.scaled_min_eig,
                }),
                Err(Error::ObservabilityDefect { min_eig, direction }) => {
                    let mut d = Table::new("observe-defect", 1, &["index", "k", "phase", "lambda", "component"]);
                    for (i, (c, m)) in direction.iter().zip(&b.modes).enumerate() {
                        d.push(vec![i.to_string(), m.k.to_string(), phase_label(m).into(), num(m.lambda), num(*c)]);
                    }
                    out.emit("observe_defect", &d, &direction).map_err(io_failure("observe_defect"))?;
                    return Err(Failure::Numerical(format!(
                        "observability defect at Lambda = {lambda}, T = {t}: min eig {min_eig:e}; near-null direction written"
                    )));
                }
                Err(e) => return Err(from_core(e)),
            }
        }
    }
    let mut t = Table::new("observe", 1, &["Lambda", "T", "dim", "c_obs", "scaled_min_eig"]);
    for r in &rows {
        t.push(vec![num(r.lambda), num(r.horizon), r.dim.to_string(), num(r.c_obs), num(r.scaled_min_eig)]);
        println!("Lambda {:>10}  T {:>8}  C_obs {}", r.lambda, r.horizon, num(r.c_obs));
    }
    out.emit("observe", &t, &rows).map_err(io_failure("observe"))?;

    let mut fits = Vec::new();
    let mut monotone_ok = true;
    for &lambda in &cfg.sweeps.lambda_list {
        let mut pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.lambda == lambda).map(|r| (r.horizon, r.c_obs)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let monotone = pts.windows(2).all(|w| w[1].1 <= w[0].1);
        monotone_ok &= monotone;
        println!("Lambda {lambda}: C_obs nonincreasing in T: {monotone}");
        if let Ok(fit) = cost_and_constant_fit(&pts, SweepAxis::Horizon { gamma: cfg.schedule.gamma }) {
            fits.push(FitRow { axis: "T", fixed: lambda, points: pts.len(), slope: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, monotone });
        }
    }
    for &t in ts {
        let mut pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.horizon == t).map(|r| (r.lambda, r.c_obs)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let monotone = pts.windows(2).all(|w| w[1].1 >= w[0].1);
        monotone_ok &= monotone;
        if let Ok(fit) = cost_and_constant_fit(&pts, SweepAxis::Cutoff) {
            fits.push(FitRow { axis: "Lambda", fixed: t, points: pts.len(), slope: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, monotone });
        }
    }
    let mut f = Table::new("observe-fit", 1, &["axis", "fixed", "points", "slope", "intercept", "r_squared", "monotone"]);
    for r in &fits {
        f.push(vec![r.axis.into(), num(r.fixed), r.points.to_string(), num(r.slope), num(r.intercept), num(r.r_squared), r.monotone.to_string()]);
        println!("fit log C_obs over {} (fixed {}): slope {:.6}, R^2 {:.6}", r.axis, r.fixed, r.slope, r.r_squared);
    }
    out.emit("observe_fit", &f, &fits).map_err(io_failure("observe_fit"))?;
    if monotone_ok {
        Ok(())
    } else {
        Err(Failure::Numerical("C_obs is not monotone along a sweep".into()))
    }
}

/// Normalised random mix of the `count` lowest modes (zero if `count = 0`).
pub fn initial_state(b: &EigenBasis, count: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0.0; b.len()];
    for v in c.iter_mut().take(count) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        c.iter_mut().for_each(|x| *x /= nrm);
    }
    StateVector::from_coeffs(b, c).expect("length matches")
}

pub fn cmd_control(cfg: &RunConfig) -> Outcome {
    let s = &cfg.schedule;
    let schedule = make_schedule(s.horizon, s.gamma, s.epsilon, s.lambda_cap).map_err(from_core)?;
    if schedule.max_lambda() > cfg.lambda_max() {
        return Err(Failure::Usage(format!(
            "schedule.Lambda_cap: the schedule needs Lambda = {} but basis.Lambda_max = {}",
            schedule.max_lambda(),
            cfg.lambda_max()
        )));
    }
    let out = sink(cfg)?;
    let b = obtain_basis(cfg)?;
    if s.z0_modes > b.len() {
        return Err(Failure::Usage(format!("schedule.z0_modes: {} exceeds the {} basis modes", s.z0_modes, b.len())));
    }
    let z0 = initial_state(&b, s.z0_modes, s.z0_seed);
    let r = run_lr(&z0, &schedule, &b, &cfg.rect(), s.reg_threshold).map_err(from_core)?;

    let mut t = Table::new(
        "control-stages",
        1,
        &[
            "index", "start", "tau", "window_start", "window_end", "lambda", "clipped", "controlled_modes", "pre_norm",
            "window_norm", "post_norm", "low_residual", "cost", "cond_estimate", "rank", "threshold_binding", "observation",
        ],
    );
    for (st, rec) in schedule.stages.iter().zip(&r.stages) {
        t.push(vec![
            rec.index.to_string(),
            num(st.start),
            num(rec.tau),
            num(st.window.0),
            num(st.window.1),
            num(rec.lambda),
            rec.clipped.to_string(),
            rec.controlled_modes.to_string(),
            num(rec.pre_norm),
            num(rec.window_norm),
            num(rec.post_norm),
            num(rec.low_residual),
            num(rec.cost),
            num(rec.cond_estimate),
            rec.rank.to_string(),
            rec.threshold_binding.to_string(),
            num(rec.observation),
        ]);
        println!(
            "stage {:>2}  Lambda {:>10.3}  modes {:>5}  post-norm {:.3e}  low residual {:.3e}  cost {:.3e}{}",
            rec.index,
            rec.lambda,
            rec.controlled_modes,
            rec.post_norm,
            rec.low_residual,
            rec.cost,
            if rec.threshold_binding { "  (threshold binding)" } else { "" }
        );
    }
    let pass = r.final_norm <= s.tolerance * r.initial_norm;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "none".into());
    let mut summary = Table::new("control-summary", 1, &["quantity", "value"]);
    for (k, v) in [
        ("initial_norm", num(r.initial_norm)),
        ("final_norm", num(r.final_norm)),
        ("total_cost", num(r.total_cost)),
        ("max_low_residual", num(r.max_low_residual)),
        ("reg_threshold", num(r.reg_threshold)),
        ("c1", opt(r.c1)),
        ("c1_controlled", opt(r.c1_controlled)),
        ("spill_bound", num(r.spill_bound)),
        ("final_passive", num(schedule.final_passive())),
        ("pass", pass.to_string()),
    ] {
        summary.push(vec![k.into(), v]);
    }
    match cfg.io.format {
        crate::config::Format::Csv => {
            out.write_text("control_stages.csv", &t.render()).map_err(io_failure("control_stages"))?;
            out.write_text("control_summary.csv", &summary.render()).map_err(io_failure("control_summary"))?;
            let mut c = Table::new("control-coefficients", 1, &["stage", "mode", "k", "phase", "lambda", "coefficient"]);
            for (i, seg) in r.segments.iter().enumerate() {
                for (j, (v, m)) in seg.coeffs.iter().zip(&b.modes).enumerate() {
                    c.push(vec![i.to_string(), j.to_string(), m.k.to_string(), phase_label(m).into(), num(m.lambda), num(*v)]);
                }
            }
            out.write_text("control_coefficients.csv", &c.render()).map_err(io_failure("control_coefficients"))?;
        }
        crate::config::Format::Structured => {
            out.write_text("control_report.json", &crate::output::to_json(&r)).map_err(io_failure("control_report"))?;
        }
    }
    println!(
        "final norm {} (initial {}), total cost {}, C1 {}",
        num(r.final_norm),
        num(r.initial_norm),
        num(r.total_cost),
        opt(r.c1)
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "final norm {:e} exceeds {} x initial norm {:e}",
            r.final_norm, s.tolerance, r.initial_norm
        )))
    }
}

/// `∫₀^w e^{−Λ(w−t)} M e^{−Λ(w−t)} dt` by the trapezoid rule on `nodes` points.
fn trapezoid_gramian(lam: &[f64], m: &DMatrix<f64>, w: f64, nodes: usize) -> DMatrix<f64> {
    let n = lam.len();
    let h = w / (nodes - 1) as f64;
    let mut g = DMatrix::zeros(n, n);
    for q in 0..nodes {
        let s = w - q as f64 * h;
        let wt = if q == 0 || q == nodes - 1 { 0.5 * h } else { h };
        let e: Vec<f64> = lam.iter().map(|l| (-l * s).exp()).collect();
        for j in 0..n {
            for l in 0..n {
                g[(j, l)] += wt * e[j] * m[(j, l)] * e[l];
            }
        }
    }
    g
}

pub fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let out = sink(cfg)?;
    let b = obtain_basis(cfg)?;
    let mut checks = orthonormality_checks(&b);

    // Dispersion roots against the finite-difference oracle.
    let mut oracle = 0.0f64;
    for k in 1..=b.k_range.saturating_sub(1).min(4) {
        let ours: Vec<f64> = b.modes.iter().filter(|m| m.k == k && m.phase == Some(Phase::Cosine)).map(|m| m.lambda).take(3).collect();
        if ours.is_empty() {
            continue;
        }
        let fd = oracle_eigs(k, 200, ours.len()).map_err(from_core)?;
        for (a, o) in ours.iter().zip(&fd) {
            oracle = oracle.max((a - o.lambda).abs() / o.lambda);
        }
    }
    checks.push(Check { check: "oracle_agreement", value: oracle, tolerance: 1e-6, pass: oracle <= 1e-6 });

    let rect = cfg.rect();
    let region = obs_gramian(&b, &rect);
    let psd = region.m.clone().symmetric_eigenvalues().min();
    checks.push(Check { check: "region_gramian_psd", value: psd, tolerance: -1e-12, pass: psd >= -1e-12 });

    let top = cfg.lambda_max().min(100.0);
    let cutoffs = [0.25 * top, 0.5 * top, top];
    if cutoffs.iter().filter(|&&l| b.count_below(l) > 0).count() == 3 {
        let rep = spec_ineq_report(&b, &cutoffs, &rect, &cfg.kernel()).map_err(from_core)?;
        let min = rep.records.iter().map(|r| r.min_eig).fold(f64::INFINITY, f64::min);
        checks.push(Check { check: "weighted_gramian_positive", value: min, tolerance: 0.0, pass: min > 0.0 });
    }

    let count = b.len().min(30);
    if count > 0 {
        let sub = b.subset(&(0..count).collect::<Vec<_>>());
        let z = initial_state(&sub, count, 1);
        let grid = SampleGrid::uniform(cfg.kernel.s0, 12, 12, 12);
        let field = augmented_field(&sub, &z.coeffs, sub.cutoff, &rect, &grid.s).map_err(from_core)?;
        let res = residual_augmented(&field, &grid).max();
        checks.push(Check { check: "augmented_residual", value: res, tolerance: 1e-7, pass: res <= 1e-7 });
    }

    let lambda = cfg.lambda_max().min(100.0);
    let w = 0.05;
    let g = stage_gramian(&b, lambda, &rect, w).map_err(from_core)?;
    let n = g.nrows();
    let reference = trapezoid_gramian(&b.lambdas()[..n], &region.leading(n), w, 10_000);
    let dev = (g - reference).amax();
    checks.push(Check { check: "stage_gramian_quadrature", value: dev, tolerance: 1e-8, pass: dev <= 1e-8 });

    let p1 = out.dir.join(".verify_first.json");
    let p2 = out.dir.join(".verify_second.json");
    let same = save_basis(&b, &p1)
        .and_then(|_| load_basis(&p1))
        .and_then(|l| save_basis(&l, &p2))
        .map(|_| std::fs::read(&p1).ok() == std::fs::read(&p2).ok())
        .unwrap_or(false);
    let _ = std::fs::remove_file(&p1);
    let _ = std::fs::remove_file(&p2);
    checks.push(Check { check: "persistence_round_trip", value: if same { 0.0 } else { 1.0 }, tolerance: 0.0, pass: same });

    out.emit("verify", &check_table("verify", &checks), &checks).map_err(io_failure("verify"))?;
    print_checks(&checks);
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Numerical("invariant suite failed".into()))
    }
}
