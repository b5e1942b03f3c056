use std::path::PathBuf;

use edgemig_core::cost_model::FitError;
use edgemig_core::distance_mdp::MdpError;
use edgemig_core::simulator::SimError;
use thiserror::Error;

use crate::config::ConfigError;
use crate::traces::TraceError;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_CONVERGENCE: u8 = 4;
pub const EXIT_DEGENERATE: u8 = 5;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error("cost fit failed: {0}")]
    Fit(#[from] FitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
}

fn mdp_exit_code(e: &MdpError) -> u8 {
    match e {
        MdpError::NonConvergence { .. } | MdpError::SingularSegment { .. } => EXIT_CONVERGENCE,
        MdpError::DegenerateSpec => EXIT_DEGENERATE,
        MdpError::InvalidSpec { .. } | MdpError::InvalidAction { .. } | MdpError::InvalidPolicy(_) => EXIT_VALIDATION,
    }
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => EXIT_VALIDATION,
            AppError::Trace(TraceError::Io { .. }) => EXIT_IO,
            AppError::Trace(TraceError::Parse { .. }) => EXIT_VALIDATION,
            AppError::Trace(TraceError::Empty { .. }) => EXIT_DEGENERATE,
            AppError::Mdp(e) => mdp_exit_code(e),
            AppError::Fit(_) => EXIT_DEGENERATE,
            AppError::Sim(SimError::Mdp(e)) => mdp_exit_code(e),
            AppError::Sim(SimError::InvalidConfig { .. } | SimError::DivergentLoad { .. }) => EXIT_VALIDATION,
            AppError::Sim(_) => EXIT_DEGENERATE,
            AppError::Io { .. } | AppError::Csv { .. } | AppError::Json { .. } => EXIT_IO,
        }
    }
}
