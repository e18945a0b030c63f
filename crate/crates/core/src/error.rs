use std::io;

use thiserror::Error;

use crate::family::FamilyTag;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is outside the chain [1, {n}]")]
    OutOfRange { n: u8, value: u32 },

    #[error("point {0} is assigned twice")]
    DuplicatePoint(u8),

    #[error("chain size mismatch: {left} vs {right}")]
    SizeMismatch { left: u8, right: u8 },

    #[error("chain size {0} is not supported (1..={max})", max = crate::map::MAX_CHAIN)]
    ChainSize(u32),

    #[error("the empty map has no kernel partition")]
    EmptyDomain,

    #[error("id {id} is out of range for chain size {n}")]
    IdOutOfRange { n: u8, id: u64 },

    #[error("{what} at n = {n} exceeds the configured budget (max n = {max})")]
    BudgetExceeded { what: &'static str, n: u8, max: u8 },

    #[error("operation is not supported for family {0}")]
    FamilyUnsupported(FamilyTag),

    #[error("relation {0} is not supported here")]
    UnsupportedRelation(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("element is not a member of {0}")]
    NotMember(FamilyTag),

    #[error("height {0} is below 3")]
    HeightTooSmall(usize),

    #[error("element is not idempotent")]
    NotIdempotent,

    #[error("element is not strongly regular")]
    NotStronglyRegular,

    #[error("malformed cache file: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 3 for budget problems, 4 for I/O, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 3,
            Error::Io(_) | Error::CacheFormat(_) | Error::Json(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
