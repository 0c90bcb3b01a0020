use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("empty block has no frequency denominator")]
    EmptyBlock,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },
    #[error("depth {needed} requested but only {available} available")]
    DepthShortfall { needed: usize, available: usize },
    #[error("table of {0} entries is too large")]
    TableTooLarge(u128),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("weights must be nonnegative and sum to 1")]
    WeightSum,
    #[error("mixed depths or alphabets in barycenter")]
    MixedDepths,
    #[error("empty list of measures")]
    EmptySpecList,
    #[error("checkpoint {checkpoint} exceeds sequence length {len}")]
    CheckpointExceedsLength { checkpoint: usize, len: usize },
    #[error("window exhausted at position {position}: need {needed} symbols, {available} left")]
    WindowExhausted {
        position: usize,
        needed: usize,
        available: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed cuts: {0}")]
    MalformedCuts(String),
    #[error("horizon {horizon} exceeds window of size {window}")]
    HorizonExceedsWindow { horizon: usize, window: usize },
    #[error("radius {radius} does not exceed the truncation tail {tail}")]
    RadiusBelowTail { radius: f64, tail: f64 },
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(String, String),
    #[error("predicate `{0}` has no callback bound")]
    UnboundPredicate(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by malformed input, as opposed to well-formed input that
    /// violates an operation's preconditions.
    pub fn is_bad_input(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::UnknownSymbol(_)
                | Error::DuplicateSymbol(_)
                | Error::EmptyAlphabet
                | Error::SymbolOutOfRange { .. }
                | Error::InvalidMeasure(_)
                | Error::InvalidInterval(..)
                | Error::MalformedCuts(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
