use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),

    #[error("index {0} is out of range: {1}")]
    IndexOutOfRange(u64, &'static str),

    #[error("index k*p overflows u64 (k={k}, p={p})")]
    IndexOverflow { k: u64, p: u64 },

    #[error("family {family}: numerator at p={p} is not divisible by d={d}")]
    IntegralityViolation { family: String, p: u64, d: u64 },

    #[error("V_n mod {modulus} is not purely periodic: gcd(Q, m) = {gcd}")]
    NotPurelyPeriodic { modulus: u64, gcd: u64 },

    #[error("period search for modulus {0} exceeded the m^2 + 1 state bound")]
    PeriodCapExceeded(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse theorem line {line}: {reason}")]
    TheoremParse { line: usize, reason: String },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("range inverted: p_from={from} > p_to={to}")]
    RangeInverted { from: u64, to: u64 },

    #[error("corrupted checkpoint {path}, line {line}: {reason}")]
    CorruptCheckpoint {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("checkpoint {path} belongs to a different search: {reason}")]
    CheckpointMismatch { path: PathBuf, reason: String },

    #[error("filter unsound: {q} does not divide F({p})")]
    FilterUnsound { p: u64, q: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
