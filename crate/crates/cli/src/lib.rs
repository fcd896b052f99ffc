//! Experiment drivers and report rendering behind the `tpfem` command.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Command, Format, RunConfig, Scenario, SolverKind};
pub use experiments::{run, RunError};
pub use report::Report;
