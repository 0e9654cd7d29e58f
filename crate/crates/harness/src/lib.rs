//! Experiment harness for reward-machine agents under labelling noise.
//!
//! Trains QRM agents on CookieWorld or SymbolWorld, persists their policies,
//! sweeps them over noise levels and reports the pooled robustness metrics
//! as CSV or markdown. The `rmnoise` binary wraps all of this in a CLI.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod config;
pub mod experiment;
pub mod policy;
pub mod report;

pub use config::ExperimentConfig;
pub use experiment::{build_env, evaluate, evaluate_with, run_training, train_agents, SwapSeenSymbol};
pub use policy::{load_policy, load_policy_dir, save_policy, Policy, PolicyMeta};
pub use report::{markdown, read_csv, write_csv, write_markdown};
pub use rmnoise_core;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("corrupt policy file {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error("unsupported policy format version {found} (expected {expected})")]
    Version { found: String, expected: u32 },
    #[error("{what} mismatch: expected {expected}, found {found}")]
    Mismatch {
        what: &'static str,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Grid(#[from] rmnoise_core::grid::GridError),
    #[error(transparent)]
    Qrm(#[from] rmnoise_core::qrm::QrmError),
    #[error(transparent)]
    Rm(#[from] rmnoise_core::RmError),
    #[error(transparent)]
    Noise(#[from] rmnoise_core::noise::NoiseError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
