use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("infeasible detection radius: {0}")]
    InfeasibleRadius(String),
    #[error("fillet at waypoint {index} does not fit: {reason}")]
    InfeasibleSmoothing { index: usize, reason: String },
    #[error("start or goal lies inside the detection polygon of radar `{radar}`")]
    InfeasibleEndpoint { radar: String },
    #[error("goal is unreachable from start")]
    NoPath,
    #[error(
        "no valid path within {iterations} iterations ({violations} violating samples remain)"
    )]
    IterationCap {
        iterations: usize,
        violations: usize,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Validation(_) => 2,
            Error::InfeasibleRadius(_)
            | Error::InfeasibleSmoothing { .. }
            | Error::InfeasibleEndpoint { .. }
            | Error::NoPath
            | Error::IterationCap { .. } => 3,
            Error::Domain(_) | Error::DegenerateGeometry(_) | Error::Numerical(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
