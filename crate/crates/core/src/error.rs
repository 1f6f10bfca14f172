use thiserror::Error;

pub type Result<T> = std::result::Result<T, QheError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QheError {
    #[error("wire {wire} out of range for a {num_wires}-wire register")]
    WireOutOfRange { wire: usize, num_wires: usize },

    #[error("control and target must differ (both are wire {0})")]
    SameControlTarget(usize),

    #[error("wire {0} listed more than once")]
    DuplicateWire(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("gate {0} is not a single-qubit gate")]
    NotSingleQubit(&'static str),

    #[error("gate {gate} expects {expected} wire(s), got {actual}")]
    Arity {
        gate: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("a register needs at least one wire")]
    EmptyRegister,

    #[error("scripted measurement ran out of bits")]
    ScriptExhausted,

    #[error("scripted outcome {bit} on wire {wire} has probability {probability:e}")]
    ImpossibleOutcome {
        wire: usize,
        bit: u8,
        probability: f64,
    },

    #[error("exhaustive policy cannot pick a single outcome; use measure_wire_branches")]
    ExhaustiveNeedsBranching,

    #[error("wire {wire} is not in the classical state {value} (stray weight {weight:e})")]
    NotClassical { wire: usize, value: u8, weight: f64 },

    #[error("state dimensions differ: {0} vs {1} wires")]
    DimensionMismatch(usize, usize),

    #[error("invalid bit string {0:?}")]
    InvalidBits(String),

    #[error("invalid key {0:?}")]
    InvalidKey(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("circuit contains a non-Clifford gate ({gate} on wire {wire}, op #{index})")]
    NonClifford {
        gate: &'static str,
        wire: usize,
        index: usize,
    },

    #[error("unsupported search register size m = {0} (only m = 2 is built)")]
    UnsupportedSearchSize(usize),

    #[error("key register too large: {0}")]
    TooLarge(String),

    #[error("key search failed after {0} attempts")]
    SearchExhausted(usize),

    #[error("matrix is not invertible over GF(2)")]
    Singular,

    #[error("{0}")]
    Protocol(String),
}
