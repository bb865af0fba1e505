use std::fmt;

/// Why an endpoint sequence fails to be a universal interval representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// The sequence length differs from `n`.
    WrongLength { expected: usize, actual: usize },
    /// `e_i < i`: the interval would end before it starts.
    BeforeLeft,
    /// `e_i > n`.
    PastEnd,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { expected, actual } => {
                write!(f, "expected {expected} endpoints, found {actual}")
            }
            Violation::BeforeLeft => f.write_str("right endpoint precedes left endpoint"),
            Violation::PastEnd => f.write_str("right endpoint exceeds n"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid universal representation at vertex {index}: {reason}")]
    InvalidRep { index: usize, reason: Violation },

    #[error("invalid classic representation: {0}")]
    InvalidClassic(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("vertex count must be positive")]
    ZeroVertices,

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("value {value} outside universe of size {universe}")]
    ValueOutOfRange { value: u128, universe: u128 },

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("element universe {universe} exceeds group capacity {target}")]
    UniverseTooLarge { universe: u128, target: u128 },

    #[error("group plan does not match the value sequence: {0}")]
    PlanMismatch(String),

    #[error("degree sequence inconsistent at vertex {index}: derived endpoint {derived}")]
    InconsistentDegrees { index: usize, derived: i128 },

    #[error("corrupt code: {0}")]
    Corrupt(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
