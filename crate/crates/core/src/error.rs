use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("iterated commutator needs k >= 1")]
    ZeroCommutatorLength,

    #[error("order undetected: no power up to {bound} is the identity")]
    OrderUndetected { bound: u64 },

    #[error("element has infinite order")]
    InfiniteOrder,

    #[error("operation needs a finite group, but the backend is {0}")]
    NotFinite(String),

    #[error("closure overflow: more than {bound} elements")]
    ClosureOverflow { bound: usize },

    #[error("group is not solvable: derived series stabilises at order {order}")]
    NotSolvable { order: usize },

    #[error("element is not in the derived subgroup")]
    NotInDerivedSubgroup,

    #[error("no product of at most {max_len} commutators reaches the element")]
    DecompositionTooLong { max_len: usize },

    #[error("arity mismatch: expected {expected} images, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("generator index {index} out of range (have {count})")]
    GeneratorOutOfRange { index: usize, count: usize },

    #[error("sequence is not strictly increasing at position {position}")]
    NotIncreasing { position: usize },

    #[error("support layout does not fit modulus {modulus}; smallest admissible modulus is {suggested}")]
    Capacity { modulus: u64, suggested: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("target mismatch between base functions")]
    TargetMismatch,

    #[error("not periodic: {0}")]
    NotPeriodic(String),

    #[error("value outside the cyclic subgroup at {0}")]
    OutsideCyclic(String),

    #[error("index {index} out of range 1..={total}")]
    IndexOutOfRange { index: usize, total: usize },

    #[error("integral does not close around a cyclic axis: {0}")]
    IntegralNotClosed(String),

    #[error("element has nontrivial active part")]
    NotBase,

    #[error("abelianization is not free abelian; use the 4-generator construction")]
    AbelianizationNotFree,

    #[error("finite orders required: {0}")]
    FiniteOrdersRequired(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
