use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tpfem::fe::{apply_operator, assemble_rhs, h1_seminorm_error, l2_error, HierarchyConfig, Level, MeshHierarchy};
use tpfem::gpu::{
    bank_trace, mma_fragment_pattern, search_conflict_free_swizzle, shared_bandwidth_report, vram_roofline,
    FragmentPrecision, LayoutFn, MmaShape, Role,
};
use tpfem::krylov::{fgmres, gmres, SolveReport, SolveStatus};
use tpfem::multigrid::{Multigrid, VCycleConfig};
use tpfem::precision::{relative_error, PrecisionMode};
use tpfem::tensor::{count_flops, Evaluation, FlopVariant, Matrix1D, SeparableOperator};

use crate::config::{Command, ConfigError, RunConfig, Scenario, SolverKind};
use crate::report::{num, Report};

/// Peak memory bandwidth of the modelled device in bytes/s.
pub const VRAM_BANDWIDTH: f64 = 2.0e12;

#[derive(Debug)]
pub enum RunError {
    Usage(ConfigError),
    Library(tpfem::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(e) => write!(f, "{e}"),
            Self::Library(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<tpfem::Error> for RunError {
    fn from(e: tpfem::Error) -> Self {
        Self::Library(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Usage(e)
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Runs the experiment selected by `config.command`.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    match config.command {
        Command::Solve => solve(config),
        Command::Convergence => convergence(config),
        Command::ErrorProfile => error_profile(config),
        Command::Residuals => residuals(config),
        Command::BankSim => bank_sim(config),
        Command::Roofline => roofline(config),
        Command::Flops => flops(config),
    }
}

/// `u = Π sin(π x_i)` on the unit cube with homogeneous Dirichlet data.
pub fn exact_solution(x: &[f64]) -> f64 {
    x.iter().map(|t| (PI * t).sin()).product()
}

pub fn exact_gradient(x: &[f64]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for (i, gi) in g.iter_mut().enumerate().take(x.len()) {
        *gi = x
            .iter()
            .enumerate()
            .map(|(j, t)| if i == j { PI * (PI * t).cos() } else { (PI * t).sin() })
            .product();
    }
    g
}

pub fn hierarchy(dim: usize, k: usize, level: usize) -> Result<Arc<MeshHierarchy>> {
    Ok(Arc::new(MeshHierarchy::new(&HierarchyConfig::new(dim, k, level))?))
}

/// Solves the manufactured problem on the finest level of `hierarchy` with a
/// multigrid preconditioner in `mode`; the report carries L2 and H1 errors.
pub fn solve_manufactured(
    hierarchy: &Arc<MeshHierarchy>,
    mode: PrecisionMode,
    solver: SolverKind,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let level = hierarchy.finest();
    let dim = level.dim as f64;
    let f = move |x: &[f64]| dim * PI * PI * exact_solution(x);
    let b = assemble_rhs(level, &f, &|_| 0.0);
    let mg = Multigrid::new(hierarchy.clone(), VCycleConfig::with_mode(mode))?;
    let apply_a = |v: &[f64]| apply_operator(level, v, PrecisionMode::Fp64);
    let apply_m = |v: &[f64]| mg.precondition(v);
    let (x, mut report) = match solver {
        SolverKind::Fgmres => fgmres(apply_a, apply_m, &b, tol, maxit)?,
        SolverKind::Gmres => gmres(apply_a, apply_m, &b, tol, maxit)?,
    };
    report.l2_error = Some(l2_error(level, &x, &exact_solution)?);
    report.h1_error = Some(h1_seminorm_error(level, &x, &exact_gradient)?);
    Ok((x, report))
}

fn status_str(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::Breakdown => "breakdown",
        SolveStatus::MaxIterations => "max_iterations",
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn solve(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new(
        cfg,
        &[
            "level",
            "n_dofs",
            "precision",
            "solver",
            "iterations",
            "status",
            "final_relative_residual",
            "l2_error",
            "h1_error",
            "time_s",
            "speedup_vs_fp64",
        ],
    );
    if !cfg.timing {
        report.notes.push("timing disabled; pass --timing to fill time_s and speedup_vs_fp64".into());
    }
    for &l in &cfg.levels {
        let h = hierarchy(cfg.dim, cfg.k, l)?;
        let mut runs = Vec::new();
        for &mode in &cfg.precision {
            let (_, rep) = solve_manufactured(&h, mode, cfg.solver, cfg.tol, cfg.maxit)?;
            report.failed |= rep.status != SolveStatus::Converged;
            runs.push((mode, rep));
        }
        let base = runs.iter().find(|(m, _)| *m == PrecisionMode::Fp64).map(|(_, r)| r.wall_time);
        for (mode, rep) in runs {
            let (time, speedup) = if cfg.timing {
                (num(rep.wall_time), base.map_or(Value::Null, |t| num(t / rep.wall_time)))
            } else {
                (Value::Null, Value::Null)
            };
            report.push(vec![
                json!(l),
                json!(h.finest().n_dofs()),
                json!(mode.as_str()),
                json!(cfg.solver),
                json!(rep.iterations),
                json!(status_str(rep.status)),
                num(rep.final_relative_residual),
                opt(rep.l2_error),
                opt(rep.h1_error),
                time,
                speedup,
            ]);
        }
    }
    Ok(report)
}

fn rate(prev: Option<f64>, cur: f64) -> Value {
    prev.map_or(Value::Null, |p| num((p / cur).log2()))
}

fn convergence(cfg: &RunConfig) -> Result<Report> {
    let mode = cfg.precision[0];
    let mut report = Report::new(
        cfg,
        &["level", "n_dofs", "h", "precision", "iterations", "status", "l2_error", "l2_rate", "h1_error", "h1_rate"],
    );
    let (mut prev_l2, mut prev_h1) = (None, None);
    for &l in &cfg.levels {
        let h = hierarchy(cfg.dim, cfg.k, l)?;
        let (_, rep) = solve_manufactured(&h, mode, cfg.solver, cfg.tol, cfg.maxit)?;
        report.failed |= rep.status != SolveStatus::Converged;
        let (l2, h1) = (rep.l2_error.unwrap_or(f64::NAN), rep.h1_error.unwrap_or(f64::NAN));
        report.push(vec![
            json!(l),
            json!(h.finest().n_dofs()),
            num(h.finest().h),
            json!(mode.as_str()),
            json!(rep.iterations),
            json!(status_str(rep.status)),
            num(l2),
            rate(prev_l2, l2),
            num(h1),
            rate(prev_h1, h1),
        ]);
        prev_l2 = Some(l2);
        prev_h1 = Some(h1);
    }
    Ok(report)
}

/// Relative l2 error of `v = Au` in each mode against fp64, one entry per sample.
///
/// Sample `s` uses a vector with entries uniform in `[-1, 1)` drawn from a
/// ChaCha8 stream seeded with `seed + s`.
pub fn operator_errors(level: &Level, modes: &[PrecisionMode], seed: u64, samples: usize) -> tpfem::Result<Vec<Vec<f64>>> {
    let mut out = vec![Vec::with_capacity(samples); modes.len()];
    for s in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
        let u: Vec<f64> = (0..level.n_dofs()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let reference = apply_operator(level, &u, PrecisionMode::Fp64)?;
        for (m, &mode) in modes.iter().enumerate() {
            let v = apply_operator(level, &u, mode)?;
            out[m].push(relative_error(&v, &reference)?);
        }
    }
    Ok(out)
}

fn error_profile(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new(cfg, &["level", "n_dofs", "patch_size", "precision", "relative_error", "samples"]);
    for &l in &cfg.levels {
        let level = Level::new(cfg.dim, cfg.k, l)?;
        let errors = operator_errors(&level, &cfg.precision, cfg.seed, cfg.samples)?;
        for (mode, errs) in cfg.precision.iter().zip(errors) {
            report.push(vec![
                json!(l),
                json!(level.n_dofs()),
                json!(2 * (cfg.k + 1)),
                json!(mode.as_str()),
                num(errs.iter().sum::<f64>() / errs.len() as f64),
                json!(cfg.samples),
            ]);
        }
    }
    Ok(report)
}

fn residuals(cfg: &RunConfig) -> Result<Report> {
    let l = *cfg.levels.last().expect("validated");
    let h = hierarchy(cfg.dim, cfg.k, l)?;
    let mut report = Report::new(cfg, &["level", "precision", "iteration", "residual_norm", "relative_residual"]);
    for &mode in &cfg.precision {
        let (_, rep) = solve_manufactured(&h, mode, cfg.solver, cfg.tol, cfg.maxit)?;
        report.failed |= rep.status != SolveStatus::Converged;
        for (j, (r, rel)) in rep.residual_history.iter().zip(rep.relative_history()).enumerate() {
            report.push(vec![json!(l), json!(mode.as_str()), json!(j), num(*r), num(rel)]);
        }
    }
    Ok(report)
}

/// Bank report of one MMA operand role under the layout of `scenario`.
pub fn bank_scenario(scenario: Scenario, role: Role) -> tpfem::Result<(LayoutFn, tpfem::gpu::BankReport)> {
    let (precision, shape, swizzled) = match scenario {
        Scenario::Fp64Naive => (FragmentPrecision::Fp64, MmaShape::FP64, false),
        Scenario::Fp64Swizzled => (FragmentPrecision::Fp64, MmaShape::FP64, true),
        Scenario::Fp16Naive => (FragmentPrecision::Fp16, MmaShape::FP16, false),
        Scenario::Fp16Swizzled => (FragmentPrecision::Fp16, MmaShape::FP16, true),
    };
    let pattern = mma_fragment_pattern(shape, precision, role)?;
    let naive = LayoutFn::row_major(pattern.rows, pattern.cols, pattern.word_bytes)?;
    let layout = if swizzled {
        match search_conflict_free_swizzle(&pattern, pattern.rows, pattern.cols, pattern.word_bytes) {
            Some(s) => LayoutFn::with_swizzle(pattern.rows, pattern.cols, pattern.word_bytes, s)?,
            None => naive,
        }
    } else {
        naive
    };
    let report = bank_trace(&layout, &pattern)?;
    Ok((layout, report))
}

fn role_str(role: Role) -> &'static str {
    match role {
        Role::A => "A",
        Role::B => "B",
        Role::C => "C",
    }
}

fn bank_sim(cfg: &RunConfig) -> Result<Report> {
    let mut report = Report::new(
        cfg,
        &[
            "scenario",
            "role",
            "rows",
            "cols",
            "word_bytes",
            "swizzle_group",
            "swizzle_period",
            "bijective",
            "phase_wavefronts",
            "total_wavefronts",
            "conflict",
            "summary",
        ],
    );
    for &scenario in &cfg.scenarios {
        for role in [Role::A, Role::B, Role::C] {
            let (layout, bank) = bank_scenario(scenario, role)?;
            let (g, p) = layout.swizzle.map_or((1, 1), |s| (s.group, s.period));
            let phases: Vec<String> = bank.phase_wavefronts.iter().map(|w| w.to_string()).collect();
            let summary = if bank.phase_wavefronts.iter().all(|&w| w == 1) {
                "wavefronts: 1 per phase".to_string()
            } else {
                format!("wavefronts: {} per phase", phases.join(";"))
            };
            report.push(vec![
                json!(scenario.as_str()),
                json!(role_str(role)),
                json!(layout.rows),
                json!(layout.cols),
                json!(layout.word_bytes),
                json!(g),
                json!(p),
                json!(layout.is_bijection()),
                json!(phases.join(";")),
                json!(bank.total_wavefronts),
                json!(bank.conflict),
                json!(summary),
            ]);
        }
    }
    Ok(report)
}

fn laplacian_schedule(n: usize, dim: usize) -> SeparableOperator {
    let z = Matrix1D::zeros(n, n);
    SeparableOperator::laplace_like(&vec![z.clone(); dim], &vec![z; dim]).expect("square factors")
}

/// Modelled kernels: name, peak flops/s, operand bytes, accumulator bytes, storage bytes, variant.
const KERNELS: [(&str, f64, f64, f64, f64, FlopVariant); 4] = [
    ("tc_fp64", 19.5e12, 8.0, 8.0, 8.0, FlopVariant::Base),
    ("tc_fp32", 19.5e12, 4.0, 4.0, 4.0, FlopVariant::Base),
    ("tc_fp16", 312e12, 2.0, 4.0, 4.0, FlopVariant::Base),
    ("tc_fp16_ec", 312e12, 4.0, 4.0, 4.0, FlopVariant::ErrorCorrected),
];

fn roofline(cfg: &RunConfig) -> Result<Report> {
    let dim = cfg.dim;
    let shared = shared_bandwidth_report(108, 32, 4, 1.27);
    let mut report = Report::new(
        cfg,
        &[
            "kernel",
            "memory",
            "n",
            "flops_per_dof",
            "bytes_per_dof",
            "arithmetic_intensity",
            "peak_tflops",
            "bandwidth_tbs",
            "ceiling_tflops",
        ],
    );
    report.notes.push(
        "vram traffic: every patch DoF is read and written once in storage precision; \
         shared traffic: each contraction reads its matrix and input slab and writes its output slab"
            .into(),
    );
    if let Some(note) = &shared.note {
        report.notes.push(note.clone());
    }
    for n in [8usize, 16] {
        let op = laplacian_schedule(n, dim);
        let patch_dofs = n.pow(dim as u32) as f64;
        for (name, peak, operand, acc, storage, variant) in KERNELS {
            let flops = count_flops(&op, variant, Evaluation::Patch).flops_per_dof;
            let contractions = (dim * dim) as f64;
            let d_r = contractions * ((n * n) as f64 + patch_dofs) * operand / patch_dofs;
            let d_w = contractions * patch_dofs * acc / patch_dofs;
            for (memory, bytes, bw) in [("vram", 2.0 * storage, VRAM_BANDWIDTH), ("shared", d_r + d_w, shared.tb_per_s * 1e12)] {
                let ai = flops / bytes;
                let ceiling = match memory {
                    "vram" => vram_roofline(peak, bw, ai),
                    _ => peak.min(tpfem::gpu::roofline(bw, flops, d_r, d_w)?),
                };
                report.push(vec![
                    json!(name),
                    json!(memory),
                    json!(n),
                    num(flops),
                    num(bytes),
                    num(ai),
                    num(peak / 1e12),
                    num(bw / 1e12),
                    num(ceiling / 1e12),
                ]);
            }
        }
    }
    Ok(report)
}

fn flops(cfg: &RunConfig) -> Result<Report> {
    let n = 2 * (cfg.k + 1);
    let op = laplacian_schedule(n, cfg.dim);
    let mut report = Report::new(
        cfg,
        &[
            "variant",
            "n",
            "dim",
            "total_flops",
            "dofs",
            "flops_per_dof",
            "flops_per_global_dof",
            "contractions",
            "ec_conversions",
            "ec_scaling",
            "term_accumulation",
        ],
    );
    let mut per_dof = Vec::new();
    for (name, variant) in [("base", FlopVariant::Base), ("error_corrected", FlopVariant::ErrorCorrected)] {
        let r = count_flops(&op, variant, Evaluation::Patch);
        per_dof.push(r.flops_per_dof);
        let b = &r.breakdown;
        report.push(vec![
            json!(name),
            json!(n),
            json!(cfg.dim),
            json!(r.total_flops),
            json!(r.dofs),
            num(r.flops_per_dof),
            num(b.flops_per_global_dof),
            json!(b.contractions),
            json!(b.ec_conversions),
            json!(b.ec_scaling),
            json!(b.term_accumulation),
        ]);
    }
    report.notes.push(format!("error_corrected/base ratio {:.4}", per_dof[1] / per_dof[0]));
    Ok(report)
}
