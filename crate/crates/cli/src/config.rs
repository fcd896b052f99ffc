use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use tpfem::precision::PrecisionMode;

/// Experiment selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Convergence,
    ErrorProfile,
    Residuals,
    BankSim,
    Roofline,
    Flops,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Convergence => "convergence",
            Self::ErrorProfile => "error-profile",
            Self::Residuals => "residuals",
            Self::BankSim => "bank-sim",
            Self::Roofline => "roofline",
            Self::Flops => "flops",
        }
    }

    pub fn default_degree(self) -> usize {
        match self {
            Self::ErrorProfile | Self::Flops => 7,
            _ => 3,
        }
    }

    pub fn default_levels(self) -> Vec<usize> {
        match self {
            Self::Convergence => vec![2, 3, 4],
            Self::ErrorProfile => vec![1, 2, 3],
            _ => vec![3],
        }
    }

    pub fn default_precisions(self) -> Vec<PrecisionMode> {
        use PrecisionMode::*;
        match self {
            Self::Solve => vec![Fp64, Fp32, Fp16, Fp16Ec],
            Self::ErrorProfile => vec![Fp32, Fp16, Fp16Ec],
            Self::Residuals => vec![Fp64, Fp32, Fp16Ec],
            _ => vec![Fp64],
        }
    }

    pub fn default_format(self) -> Format {
        match self {
            Self::Roofline | Self::Flops => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Fgmres,
    Gmres,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Bank-conflict scenario of the `bank-sim` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Fp64Naive,
    Fp64Swizzled,
    Fp16Naive,
    Fp16Swizzled,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Self::Fp64Naive, Self::Fp64Swizzled, Self::Fp16Naive, Self::Fp16Swizzled];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fp64Naive => "fp64-naive",
            Self::Fp64Swizzled => "fp64-swizzled",
            Self::Fp16Naive => "fp16-naive",
            Self::Fp16Swizzled => "fp16-swizzled",
        }
    }
}

/// Fully resolved configuration of one run. Embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    pub k: usize,
    pub levels: Vec<usize>,
    pub precision: Vec<PrecisionMode>,
    pub solver: SolverKind,
    pub tol: f64,
    pub maxit: usize,
    pub seed: u64,
    pub samples: usize,
    pub scenarios: Vec<Scenario>,
    pub timing: bool,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    /// Defaults of `command` before any flag is applied.
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            dim: 3,
            k: command.default_degree(),
            levels: command.default_levels(),
            precision: command.default_precisions(),
            solver: SolverKind::Fgmres,
            tol: 1e-8,
            maxit: tpfem::krylov::DEFAULT_MAXIT,
            seed: 42,
            samples: 1,
            scenarios: Scenario::ALL.to_vec(),
            timing: false,
            format: command.default_format(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        if !(1..=3).contains(&self.dim) {
            return err(format!("--dim must be 1, 2 or 3, got {}", self.dim));
        }
        if !(1..=15).contains(&self.k) {
            return err(format!("--k must lie in 1..=15, got {}", self.k));
        }
        if self.levels.is_empty() {
            return err("--levels is empty".into());
        }
        if let Some(l) = self.levels.iter().find(|&&l| !(1..=10).contains(&l)) {
            return err(format!("level {l} outside 1..=10"));
        }
        if self.precision.is_empty() {
            return err("--precision is empty".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return err(format!("--tol must lie in (0, 1), got {}", self.tol));
        }
        if self.maxit == 0 {
            return err("--maxit must be positive".into());
        }
        if self.samples == 0 {
            return err("--samples must be positive".into());
        }
        if self.command == Command::Convergence && self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return err("convergence needs strictly increasing levels".into());
        }
        Ok(())
    }
}

/// Parses `3`, `2,3,4` or the inclusive range `2..4`.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, ConfigError> {
    let bad = || ConfigError(format!("cannot parse levels '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

/// Parses a comma-separated list of precision modes.
pub fn parse_precisions(s: &str) -> Result<Vec<PrecisionMode>, ConfigError> {
    let mut out = Vec::new();
    for p in s.split(',') {
        let mode = PrecisionMode::from_str(p).map_err(|e| ConfigError(e.to_string()))?;
        if !out.contains(&mode) {
            out.push(mode);
        }
    }
    Ok(out)
}
