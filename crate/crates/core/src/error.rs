use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(u32),

    #[error("word length must be at least 1, got {0}")]
    InvalidLength(u32),

    #[error("symbol {symbol} at position {position} is outside [0, {q})")]
    SymbolOutOfRange {
        symbol: u32,
        position: usize,
        q: u32,
    },

    #[error("index {index} is outside [0, {size})")]
    IndexOutOfRange { index: u64, size: u64 },

    #[error("dimension mismatch: (q={}, n={}) vs (q={}, n={})", .left.0, .left.1, .right.0, .right.1)]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("cannot shift words of length {0}")]
    ShiftTooFar(u32),

    #[error("cannot lift a set of length {from} to shorter length {to}")]
    LiftShorter { from: u32, to: u32 },

    #[error("capacity exceeded: q^n = {required} exceeds the limit of {limit} indices")]
    Capacity { required: String, limit: u64 },

    #[error("search budget exceeded: {required} subsets to examine, limit is {limit}")]
    SearchBudget { required: String, limit: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("alpha = {alpha} is out of (0,1)")]
    AlphaOutOfRange { alpha: String },

    #[error("inconsistent density profile: {0}")]
    InconsistentProfile(String),

    #[error("t = {t} out of hypothesis: t must lie in [1, {max}]")]
    OutOfHypothesis { t: u32, max: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
