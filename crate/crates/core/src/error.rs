use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),
    #[error("register `{name}` has zero {what}")]
    EmptyRegister { name: String, what: &'static str },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("qubit reference {0} does not resolve")]
    UnresolvedQubit(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("control value {value} does not fit in {width} bits")]
    ControlValueTooLarge { value: u64, width: usize },
    #[error("gate class {0} has no assigned cost")]
    MissingCost(String),
    #[error("gate class {0} must be decomposed before counting")]
    UncountableGate(String),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("draw {draw} at step {step} is out of range 0..={step}")]
    DrawOutOfRange { step: usize, draw: usize },
    #[error("invalid input set: {0}")]
    InvalidWordSet(String),
    #[error("n = {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("lowering needs {needed} idle qubits but only {available} are available")]
    InsufficientQubits { needed: usize, available: usize },
    #[error("{qubits} qubits exceed the simulation cap of {cap}")]
    SimulationCap { qubits: usize, cap: usize },
    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("too many branches (more than {0})")]
    TooManyBranches(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
