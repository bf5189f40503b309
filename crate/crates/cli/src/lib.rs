//! Configuration, report formats and reproduction cases behind the
//! `ngp-cert` binary.

pub mod config;
pub mod report;
pub mod repro;

use ngp_cert_core::certifier::SweepReport;
use ngp_cert_core::Certifier;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
    #[error("reproduction mismatch:\n{0}")]
    Mismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Certifies every speed in parallel; verdicts keep the order of `c_grid`.
pub fn parallel_sweep(certifier: &Certifier, c_grid: &[f64]) -> SweepReport {
    let verdicts = c_grid.par_iter().map(|&c| certifier.certify(c)).collect();
    SweepReport::from_verdicts(certifier, verdicts)
}
