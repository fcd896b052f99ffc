use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tpfem_cli::config::{parse_levels, parse_precisions, Command, Format, RunConfig, Scenario, SolverKind};
use tpfem_cli::{run, RunError};

const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const THREADS_ENV: &str = "TPFEM_THREADS";

#[derive(Parser)]
#[command(name = "tpfem", version, about = "Matrix-free DG kernels, mixed-precision multigrid and GPU models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the manufactured Poisson problem per level and precision.
    Solve,
    /// L2/H1 errors and rates over refinement levels.
    Convergence,
    /// Relative error of the operator application in low precision.
    ErrorProfile {
        /// Random input vectors averaged per level.
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Residual history of each preconditioner precision.
    Residuals,
    /// Shared-memory bank conflicts of MMA operand loads.
    BankSim {
        #[arg(long, value_enum, value_delimiter = ',')]
        scenario: Vec<Scenario>,
    },
    /// VRAM and shared-memory roofline ceilings.
    Roofline,
    /// Arithmetic count of the patch Laplacian.
    Flops,
}

#[derive(Args)]
struct Common {
    /// Polynomial degree.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Spatial dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Refinement levels: `3`, `2,3,4` or `2..4`.
    #[arg(long, global = true)]
    levels: Option<String>,
    /// Comma-separated precision modes (fp64, fp32, fp16, fp16_ec).
    #[arg(long, global = true)]
    precision: Option<String>,
    #[arg(long, value_enum, global = true)]
    solver: Option<SolverKind>,
    /// Relative residual reduction.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    maxit: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Record wall times (makes the report machine dependent).
    #[arg(long, global = true)]
    timing: bool,
}

fn build_config(cli: &Cli) -> Result<RunConfig, RunError> {
    let command = match &cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Convergence => Command::Convergence,
        Cmd::ErrorProfile { .. } => Command::ErrorProfile,
        Cmd::Residuals => Command::Residuals,
        Cmd::BankSim { .. } => Command::BankSim,
        Cmd::Roofline => Command::Roofline,
        Cmd::Flops => Command::Flops,
    };
    let c = &cli.common;
    let mut cfg = RunConfig::defaults(command);
    if let Some(k) = c.k {
        cfg.k = k;
    }
    if let Some(dim) = c.dim {
        cfg.dim = dim;
    }
    if let Some(levels) = &c.levels {
        cfg.levels = parse_levels(levels)?;
    }
    if let Some(p) = &c.precision {
        cfg.precision = parse_precisions(p)?;
    }
    if let Some(s) = c.solver {
        cfg.solver = s;
    }
    if let Some(t) = c.tol {
        cfg.tol = t;
    }
    if let Some(m) = c.maxit {
        cfg.maxit = m;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(f) = c.format {
        cfg.format = f;
    }
    cfg.timing = c.timing;
    match &cli.command {
        Cmd::ErrorProfile { samples } => cfg.samples = *samples,
        Cmd::BankSim { scenario } if !scenario.is_empty() => cfg.scenarios = scenario.clone(),
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(RunError::Usage(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let bytes = report.render(cfg.format);
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if report.failed {
        eprintln!("error: a solve did not reach the tolerance");
        return ExitCode::from(EXIT_NOT_CONVERGED);
    }
    ExitCode::SUCCESS
}
