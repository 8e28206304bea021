use thiserror::Error;

/// Errors raised by the algebra engine.
///
/// Axiom violations are never errors: checkers return a [`crate::Report`]
/// instead. Errors are reserved for malformed input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element has {found} coordinates, group expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("torsion order {0} is invalid (orders must be at least 2)")]
    InvalidTorsionOrder(i64),

    #[error("bicharacter values must be nonzero (entry [{row}][{col}])")]
    ZeroBicharacterValue { row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("mixed starred/unstarred letters where a pure word was required: {0}")]
    MixedStar(String),

    #[error("pairing is not Hermitian (entry [{row}][{col}] differs from its conjugate transpose by {residual:e})")]
    NotHermitian { row: usize, col: usize, residual: f64 },

    #[error("twist is not a *-twist: {0}")]
    NotStarTwist(String),

    #[error("cutoff must be at least 1, got {0}")]
    CutoffTooSmall(usize),

    #[error("a free grading group needs a positive truncation")]
    TruncationRequired,

    #[error("basis too large: {0} elements")]
    BasisTooLarge(usize),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("word `{0}` is not normal ordered")]
    NotNormal(String),

    #[error("pairing entry [{row}][{col}] is nonzero between generators of different grades")]
    PairingGrade { row: usize, col: usize },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
