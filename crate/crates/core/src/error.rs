use alloc::string::String;

/// Errors produced by the simulator, the loss functions and the trainer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit selection must not be empty")]
    EmptySelection,
    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parameter vector has length {found}, circuit expects {expected}")]
    ParameterCount { expected: usize, found: usize },
    #[error("spectrum has a single distinct eigenvalue")]
    DegenerateSpectrum,
    #[error("{0} qubits is too large for dense diagonalization")]
    TooLarge(usize),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("non-finite loss at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },
    #[error("Hermitian eigensolver did not converge")]
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
