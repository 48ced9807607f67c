//! Error taxonomy shared by every module of the crate.
//!
//! The variants mirror the caller-visible failure classes: bad arguments,
//! the two deliberately-undefined group cases (n = 1, 2), configured
//! capacity ceilings, and thresholds q outside the supported range.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The multiplicative group mod 1 or mod 2 is trivial; it has no
    /// primary decomposition.
    #[error("the multiplicative group mod {0} is trivial")]
    TrivialGroup(u64),

    /// S(1) and S(2) are left undefined.
    #[error("S({0}) is undefined")]
    UndefinedS(u64),

    /// A configured size/memory ceiling would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The threshold q is outside the range this pipeline supports.
    #[error("unsupported q = {0}: {1}")]
    UnsupportedQ(u64, String),

    /// Two values that must share a modulus did not.
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    /// An operation that requires a primitive character received an
    /// imprimitive one.
    #[error("character mod {0} is not primitive (conductor {1})")]
    NotPrimitive(u64, u64),

    /// I/O failure while reading or writing the s(p) cache.
    #[error("cache i/o: {0}")]
    CacheIo(String),

    /// A cache file had the wrong magic, layout, or declared bound.
    #[error("cache format: {0}")]
    CacheFormat(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::CacheIo(e.to_string())
    }
}
