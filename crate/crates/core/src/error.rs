use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient data: {what} needs at least {needed} observations, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error(
        "optimizer failed to converge after {restarts} restarts \
         ({evaluations} evaluations, best objective {best_objective})"
    )]
    Convergence {
        restarts: usize,
        evaluations: usize,
        best_objective: f64,
    },

    #[error("series have no overlapping years")]
    NoOverlap,

    #[error("collinear exogenous columns: {0}")]
    Collinear(String),

    #[error("scenario incomplete: {0}")]
    ScenarioIncomplete(String),

    #[error("every grid candidate failed: {0}")]
    EmptyGrid(String),

    #[error("no candidate could be backtested: {}", reasons.join("; "))]
    Selection { reasons: Vec<String> },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("internal gap in {msn} at year {year}")]
    Gap { msn: String, year: i32 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown MSN code {code:?} (nearest: {})", nearest.join(", "))]
    UnknownMsn { code: String, nearest: Vec<String> },

    #[error("missing series: {0}")]
    MissingSeries(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code, printed first on CLI failures.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InsufficientData { .. } => "E_INSUFFICIENT_DATA",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Argument(_) => "E_ARGUMENT",
            Error::Constraint(_) => "E_CONSTRAINT",
            Error::Convergence { .. } => "E_CONVERGENCE",
            Error::NoOverlap => "E_NO_OVERLAP",
            Error::Collinear(_) => "E_COLLINEAR",
            Error::ScenarioIncomplete(_) => "E_SCENARIO_INCOMPLETE",
            Error::EmptyGrid(_) => "E_EMPTY_GRID",
            Error::Selection { .. } => "E_SELECTION",
            Error::Format { .. } => "E_FORMAT",
            Error::Gap { .. } => "E_GAP",
            Error::Parse { .. } => "E_PARSE",
            Error::UnknownMsn { .. } => "E_UNKNOWN_MSN",
            Error::MissingSeries(_) => "E_MISSING_SERIES",
            Error::Coverage(_) => "E_COVERAGE",
            Error::Io { .. } => "E_IO",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
