//! Experiment driver: configuration files, CSV diagnostics and the `run`,
//! `fit` and `check` commands.

pub mod config;
pub mod output;
pub mod runner;

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] icflow::Error),

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Input { path: PathBuf, msg: String },
}

impl CliError {
    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Tag for the final status line.
    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Csv { .. } => "csv_error",
            CliError::Io { .. } => "io_error",
            CliError::Input { .. } => "input_error",
        }
    }
}
