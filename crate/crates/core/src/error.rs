use thiserror::Error;

use crate::params::ParameterSet;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("run count must be positive")]
    ZeroRuns,

    #[error("factor level must be positive")]
    ZeroLevel,

    #[error("factor count must be positive")]
    ZeroCount,

    #[error("level {level} does not divide run count {runs}")]
    LevelNotDivisor { runs: u64, level: u64 },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("parameter set {0} is not a node of the lattice")]
    UnknownNode(ParameterSet),

    #[error("no catalog entry for level {0}")]
    MissingCatalog(u64),

    #[error("no realizability fixture for N = {0}")]
    MissingFixture(u64),

    #[error("inconsistent fixture for N = {runs}: {detail}")]
    InconsistentFixture { runs: u64, detail: String },

    #[error("operation requires realizability data, but the lattice is idealized")]
    RealizabilityUnknown,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("prime {0} exceeds the supported field size (251)")]
    FieldTooLarge(u64),

    #[error("level {level} is not a power of {prime}")]
    LevelNotPowerOfPrime { level: u64, prime: u64 },

    #[error(
        "ambient mismatch: expected GF({expected_p})^{expected_n}, found GF({found_p})^{found_n}"
    )]
    AmbientMismatch {
        expected_p: u8,
        expected_n: usize,
        found_p: u8,
        found_n: usize,
    },

    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter set {0} violates the necessary existence conditions")]
    InvalidParameterSet(ParameterSet),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
