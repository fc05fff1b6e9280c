use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-physical Bloch vector ({x}, {y}, {z}): norm exceeds 1")]
    NonPhysical { x: f64, y: f64, z: f64 },

    #[error("value {value} outside the allowed range {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("code length {0} exceeds the 32-bit word limit")]
    CodeTooLong(usize),

    #[error("enumeration guard exceeded: {0}")]
    Guard(String),

    #[error("codeword set failed validation: {0}")]
    InvalidCode(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("map evaluation failed: denominator vanishes at x = {0}")]
    ZeroDenominator(f64),

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndex { index: usize, n: usize },

    #[error("postselection has zero probability")]
    ZeroProbability,

    #[error("operator is not Hermitian")]
    NotHermitian,

    #[error("state is a stabilizer state; nothing to reduce")]
    StabilizerInput,

    #[error("reduction needs at least two qubits, got {0}")]
    TooFewQubits(usize),

    #[error("witness is inconsistent: {0}")]
    InconsistentWitness(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
