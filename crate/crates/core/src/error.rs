use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lambda must be a power of two ≥ 2 (got {0})")]
    InvalidCutoff(usize),

    #[error("coupling m must be finite and > 0 (got {0})")]
    InvalidMass(f64),

    #[error("coupling {name} must be finite (got {value})")]
    InvalidCoupling { name: &'static str, value: f64 },

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("duplicate Pauli string {0}")]
    DuplicatePauliString(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bitstring {0:?}: expected only '0' and '1'")]
    InvalidBitstring(String),

    #[error("invalid Pauli string {0:?}: expected only I, X, Y, Z")]
    InvalidPauliString(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("probability {name} = {value} outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid noise model {0:?}: expected p1,p2,r01,r10")]
    InvalidNoiseSpec(String),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("shots must be >= 1")]
    ZeroShots,

    #[error("requested {requested} eigenvalues but dimension is {dim}")]
    TooManyEigenvalues { requested: usize, dim: usize },

    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,

    #[error("non-finite energy encountered at step {step}")]
    NonFiniteEnergy { step: usize },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
