use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("principal curvatures {kappa:?} lie outside the cone of {family}")]
    ConeViolation { family: String, kappa: Vec<f64> },

    #[error("unsupported grid: {0}")]
    UnsupportedMode(String),

    #[error("numerical degeneracy at node {node}: {reason}")]
    NumericalDegeneracy { node: usize, reason: String },

    #[error("time {t} is past the spherical blow-up time {limit}")]
    PastBlowup { t: f64, limit: f64 },

    #[error("radius {rho} has no preimage at time {t} (image starts at {bound})")]
    NoPreimage { rho: f64, t: f64, bound: f64 },

    #[error("admissibility lost at node {node}: kappa = {kappa:?}")]
    AdmissibilityLost { node: usize, kappa: Vec<f64> },

    #[error("no interior center admits a graph representation")]
    RegraphFailed,

    #[error("mean curvature {h} is not positive at node {node}")]
    NonpositiveH { node: usize, h: f64 },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for `{field}`: {msg}")]
    Validation { field: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: &str, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            msg: msg.into(),
        }
    }

    pub(crate) fn degenerate(node: usize, reason: impl Into<String>) -> Self {
        Error::NumericalDegeneracy {
            node,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used in status lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ConeViolation { .. } => "cone_violation",
            Error::UnsupportedMode(_) => "unsupported_mode",
            Error::NumericalDegeneracy { .. } => "numerical_degeneracy",
            Error::PastBlowup { .. } => "past_blowup",
            Error::NoPreimage { .. } => "no_preimage",
            Error::AdmissibilityLost { .. } => "admissibility_lost",
            Error::RegraphFailed => "regraph_failed",
            Error::NonpositiveH { .. } => "nonpositive_h",
            Error::DegenerateSeries(_) => "degenerate_series",
            Error::Parse { .. } => "parse_error",
            Error::Validation { .. } => "validation_error",
            Error::Io { .. } => "io_error",
        }
    }
}
