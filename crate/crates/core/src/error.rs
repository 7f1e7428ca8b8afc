use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("invalid Pauli text {0:?}")]
    ParsePauli(String),

    #[error("invalid circuit text at line {line}: {msg}")]
    ParseCircuit { line: usize, msg: String },

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probabilities must be non-negative and sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("filter not diagonal on Pauli components")]
    NotDiagonal,

    #[error("inconsistent post-selection")]
    InconsistentPostselection,

    #[error("circuit is not deterministic under the noiseless reference: {0}")]
    NonDeterministic(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_rate(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!("{name} = {p} is not in [0, 1]")));
    }
    Ok(())
}
