use thiserror::Error;

/// Errors raised by the analysis library.
///
/// `exit_class` groups these the way the CLI maps them to process exit
/// codes: usage (1), data (2), internal (3).
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's contract (index out of range,
    /// mismatched dimensions, malformed sequences, absent vertices).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The empty conjunction was passed where a sufficient cause is
    /// required; sufficiency predicates reject it.
    #[error("empty conjunction is not a valid sufficient cause")]
    EmptyConjunction,

    /// A literal set contained both a variable and its complement.
    #[error("literal set contains X{var} in both polarities", var = .0 + 1)]
    PolarityClash(usize),

    /// Exhaustive enumeration was requested beyond its supported size.
    #[error("{what} supports {limit} at most, got {got}")]
    UnsupportedSize {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    /// A declared monotonicity premise fails on the supplied tables.
    #[error("monotonicity violation: {literal} is not positively monotone for individual {individual}")]
    MonotonicityViolation { literal: String, individual: String },

    /// An operation was called on data of the wrong study design.
    #[error("wrong design: expected {expected}, data is {got}")]
    WrongDesign { expected: &'static str, got: &'static str },

    /// Probability-mode operation called on a count-mode population (or
    /// vice versa).
    #[error("wrong weight mode: {0}")]
    WrongWeightMode(&'static str),

    /// A required (stratum, assignment) cell is absent or has zero total.
    #[error("missing cell: stratum {stratum}, assignment {assignment}")]
    MissingCell { stratum: String, assignment: String },

    /// A case-control cell has zero cases or controls; odds ratios are
    /// undefined. `--continuity 0.5` adds 0.5 to every cell of the stratum.
    #[error("zero cell: stratum {stratum}, assignment {assignment} (consider --continuity 0.5)")]
    ZeroCell { stratum: String, assignment: String },

    /// The operation is outside the implemented scope.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Input file could not be parsed.
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Exit-code class used by the CLI: 1 usage, 2 data, 3 internal.
    pub fn exit_class(&self) -> i32 {
        match self {
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
