use thiserror::Error;

/// Errors raised by library operations.
///
/// Verification failures (a system that is not MUB, a function that is not
/// planar) are reported through verdicts and witnesses, not through this type.
/// `Error` is reserved for malformed inputs and violated preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element {0:?} does not belong to the group")]
    NotInGroup(Vec<u64>),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not flat: {0}")]
    NotFlat(String),
    #[error("basis {basis} is not orthonormal (columns {col_a}, {col_b})")]
    NotOrthonormal { basis: usize, col_a: usize, col_b: usize },
    #[error("vector {0} is not a unit vector")]
    NotUnit(usize),
    #[error("empty vector system")]
    EmptySystem,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("parameter constraint violated: {0}")]
    Parameter(String),
    #[error("graph has {vertices} vertices, exact solver cap is {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("vertex sets differ ({0} vs {1} rows)")]
    VertexSetMismatch(usize, usize),
    #[error("condition `{level}` violated by quadruple {witness:?}")]
    ConditionViolated { level: String, witness: [usize; 4] },
    #[error("shift points {a} and {b} do not differ by an element of the extended group's star")]
    ShiftCollision { a: usize, b: usize },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("relative difference set is not semiregular: {0}")]
    NotSemiregular(String),
    #[error("self-verification failed: {0}")]
    SelfCheck(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
