use std::path::PathBuf;

use thiserror::Error;

use crate::environment::RegimeTag;

/// Coarse failure classes, mapped onto process exit codes by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no closed form for exponent n = {exponent} in the {regime} regime")]
    UnsupportedClosedForm { exponent: u32, regime: RegimeTag },

    #[error("quadrature did not converge: estimate {value:e} with error {abs_error:e} after {intervals} intervals")]
    NoConvergence {
        value: f64,
        abs_error: f64,
        intervals: usize,
    },

    #[error("integration needs {required} panels, budget is {budget}")]
    PanelBudget { required: usize, budget: usize },

    #[error("geometric phase undefined: |modulus| = {0:e}")]
    UndefinedPhase(f64),

    #[error("at t = {t}: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_time(self, t: f64) -> Self {
        Error::AtTime {
            t,
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. }
            | Error::UnsupportedClosedForm { .. }
            | Error::Config { .. } => ErrorClass::Usage,
            Error::NoConvergence { .. } | Error::PanelBudget { .. } | Error::UndefinedPhase(_) => {
                ErrorClass::Numerical
            }
            Error::AtTime { source, .. } => source.class(),
            Error::Io { .. } => ErrorClass::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
