use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("invalid exponent {0}: must be a finite real >= 1")]
    InvalidExponent(f64),
    #[error("no candidates")]
    NoCandidates,
    #[error("duplicate candidate at positions {0} and {1}")]
    DuplicateCandidate(usize, usize),
    #[error("invalid resolution {0}: need at least {min}", min = crate::circular::MIN_RESOLUTION)]
    InvalidResolution(usize),
    #[error("unknown dataset {name:?}; valid names: {valid}")]
    UnknownDataset { name: String, valid: String },
    #[error("empty word form")]
    EmptyWordForm,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("group has no elements")]
    EmptyGroup,
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("operation is not closed: {0}")]
    NotClosed(String),
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0:?} has no inverse")]
    NoInverse(String),
    #[error("operation is not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(String, String, String),
    #[error("generators do not generate group")]
    GeneratorsDoNotGenerate,
    #[error("invalid group parameters: {0}")]
    InvalidGroupParams(String),

    #[error("degenerate denominator")]
    DegenerateDenominator,
    #[error("invalid permutation test setup: {0}")]
    InvalidPermTest(String),
}
