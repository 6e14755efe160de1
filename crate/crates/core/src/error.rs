use thiserror::Error;

/// Errors produced by frame construction, localization and transforms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mask level j = {0} is undefined (masks start at level 1)")]
    LevelUndefined(u32),

    #[error("uncertainty constant undefined: first trigonometric moment vanishes (|tau| = {0:e})")]
    UndefinedUc(f64),

    #[error("sequence has zero energy")]
    ZeroSequence,

    #[error("non-finite coefficient at index {0}")]
    NonFinite(i64),

    #[error("empty coefficient window")]
    EmptyWindow,

    #[error("resource limit exceeded: {what} needs {requested}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
