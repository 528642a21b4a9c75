use thiserror::Error;

/// Errors produced by the forensics toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("skeleton has no layers")]
    EmptySkeleton,

    #[error("polygon is degenerate (area below {0:e} mm²)")]
    DegeneratePolygon(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("footprint of {size} mm does not fit on a {bed} mm bed")]
    FootprintOutOfBed { size: f64, bed: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
