use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("degenerate period triangle{}: {reason}", fmt_t(.t))]
    DegenerateTriangle {
        reason: String,
        t: Option<Complex64>,
    },

    #[error("point is not near the divisor at infinity: {0}")]
    NotNearInfinity(String),

    #[error("ambiguous point: all three trace log-magnitudes coincide")]
    AmbiguousPoint,

    #[error("invalid nerve point: {0}")]
    InvalidNervePoint(String),

    #[error(
        "undersampled trajectory between phi = {phi_lo} and phi = {phi_hi} (angle step {step})"
    )]
    Undersampled { phi_lo: f64, phi_hi: f64, step: f64 },

    #[error("theorem violation diagnostic: {0}")]
    TheoremViolation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_t(t: &Option<Complex64>) -> String {
    match t {
        Some(t) => format!(" at t = {}{:+}i", t.re, t.im),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn degenerate(reason: impl Into<String>) -> Self {
        Error::DegenerateTriangle {
            reason: reason.into(),
            t: None,
        }
    }

    /// Attaches the puncture parameter to a degeneracy error; other errors pass through.
    pub fn with_t(self, t: Complex64) -> Self {
        match self {
            Error::DegenerateTriangle { reason, .. } => {
                Error::DegenerateTriangle { reason, t: Some(t) }
            }
            other => other,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Geometry(_)
            | Error::Quadrature(_)
            | Error::DegenerateTriangle { .. }
            | Error::NotNearInfinity(_)
            | Error::AmbiguousPoint
            | Error::InvalidNervePoint(_) => 2,
            Error::Undersampled { .. } => 3,
            Error::TheoremViolation(_) => 4,
            Error::Config(_) | Error::Io { .. } => 1,
        }
    }
}
