use thiserror::Error;

use crate::incidence::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A raw structure broke one of its own well-formedness rules.
    #[error("malformed incidence structure: {0}")]
    Malformed(String),

    #[error("not a combinatorial configuration: {}", .0.summary())]
    Configuration(Box<ValidationReport>),

    #[error("point {point} out of range for {point_count} points")]
    PointOutOfRange { point: usize, point_count: usize },

    #[error("order must be prime (got {0})")]
    NotPrime(u64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("construction needs {points} points, limit is {limit}")]
    ResourceLimit { points: u64, limit: u64 },

    #[error("part {part} has {size} points, not divisible by line size {k}")]
    Divisibility { part: usize, size: usize, k: usize },

    #[error("groups are not the neighborhood anonymity partition: {0}")]
    Partition(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("owner {0} has no forwarded queries")]
    NoData(usize),

    #[error("query {0} never reached the server")]
    UnknownQuery(u64),

    #[error("cfg parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("trace parse error on line {line}: {message}")]
    TraceParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input (as opposed to I/O or runtime failures).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::Csv(_) | Error::NoData(_) | Error::UnknownQuery(_)
        )
    }
}
