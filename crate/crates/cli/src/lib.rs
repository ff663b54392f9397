//! Command-line pipeline: `simulate` writes a synthetic world, `analyze`
//! runs the Mantel test, projections and silhouettes on real or simulated
//! inputs and writes a JSON report with CSV and SVG companions.

pub mod analyze;
pub mod args;
pub mod output;
pub mod simulate;
pub mod svg;

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] riskfield::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
