use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("feature table has no features")]
    NoFeatures,
    #[error("wrong feature count for symbol {symbol:?}: expected {expected}, found {found}")]
    WrongFeatureCount {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate symbol {0:?} in feature table")]
    DuplicateSymbol(String),
    #[error("feature value {value} for symbol {symbol:?} is outside [0, 1]")]
    FeatureOutOfRange { symbol: String, value: f64 },
    #[error("unknown phoneme {symbol:?} at position {position}")]
    UnknownPhoneme { symbol: String, position: usize },
    #[error("empty phoneme string")]
    EmptyWord,
    #[error("slot count must be positive")]
    ZeroSlots,

    #[error("empty input")]
    EmptyInput,
    #[error("split fraction {0} is outside [0, 1]")]
    InvalidFraction(f64),

    #[error("exemplar memory is empty")]
    EmptyMemory,
    #[error("vector length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("class id {0} is outside the class set")]
    UnknownClass(usize),
    #[error("class {0:?} is not in the class set")]
    UnknownClassName(String),
    #[error("scale parameter must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("class biases must lie in [0, 1], cover every class and sum to 1")]
    InvalidBiases,
    #[error("per-exemplar likelihoods must be non-negative and match the memory size")]
    InvalidLikelihoods,
    #[error("every class response strength is zero")]
    DegenerateResponse,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("hidden layer must have at least one unit")]
    NoHiddenUnits,
    #[error("epoch count must be at least one")]
    ZeroEpochs,
    #[error("learning rate must be positive and momentum non-negative")]
    InvalidRate,
    #[error("leave-one-out needs at least two entries, got {0}")]
    TooFewEntries(usize),

    #[error("threshold {0} is out of range")]
    InvalidThreshold(f64),
    #[error("search grid is empty")]
    EmptyGrid,

    #[error("invalid language spec: {0}")]
    InvalidSpec(&'static str),
    #[error("sample needs at least two classes")]
    DegenerateSample,
    #[error("sample has no default-class points")]
    NoDefaultPoints,
}
