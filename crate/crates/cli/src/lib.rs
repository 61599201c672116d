//! Batch front end for the condensate qubit solvers: configuration files in,
//! CSV and JSON artifacts out.

// NaN-rejecting `!(x > 0.0)` checks and index loops over 2×2 blocks are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
mod output;
pub mod presets;
pub mod run;

use std::path::PathBuf;

use bec_qubit_core::Error as CoreError;

pub use config::{parse_config, Experiment, RunConfig, Value};
pub use run::{run, validate, RunSummary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{experiment}: {source}")]
    Numerical {
        experiment: Experiment,
        #[source]
        source: CoreError,
    },
}

impl CliError {
    /// 1 for anything the user can fix in the config or environment, 2 for a
    /// numerical failure during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => 1,
            Self::Numerical {
                source: CoreError::InvalidParameter(_) | CoreError::GridTooSmall(_) | CoreError::InvalidExtent { .. },
                ..
            } => 1,
            Self::Numerical { .. } => 2,
        }
    }
}
