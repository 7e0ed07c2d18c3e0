use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants are grouped by the exit code the command line maps them to:
/// configuration problems, numerical failures and unreachable targets.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("chart singularity at x = {x}")]
    ChartSingularity { x: f64 },

    #[error("point ({x}, {y}) lies outside the field of view")]
    OutOfView { x: f64, y: f64 },

    #[error("parameter {s} lies past the cusp time {s_max}")]
    PastCusp { s: f64, s_max: f64 },

    #[error("cusp encountered at parameter {0}")]
    Cusp(f64),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("backtracking stalled at W = {w} after {steps} steps")]
    Stall { w: f64, steps: usize },

    #[error("target is unreachable from the seed")]
    Unreachable,

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Domain(_)
            | Error::OutOfView { .. }
            | Error::Format(_)
            | Error::Io(_)
            | Error::Image(_)
            | Error::Json(_) => 2,
            Error::Unreachable => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
