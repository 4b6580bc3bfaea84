use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("input matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryInput { deviation: f64 },

    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid Pauli label {0:?}")]
    InvalidLabel(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("schema error: missing columns {missing:?}")]
    Schema { missing: Vec<String> },

    #[error("duplicate bond distance {0} in coefficient table")]
    DuplicateBondDistance(f64),

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("calibration system is singular (condition number {condition:.3e})")]
    SingularCalibration { condition: f64 },

    #[error("tomography design matrix is rank deficient (rank {rank} < {required})")]
    RankDeficient { rank: usize, required: usize },

    #[error("state has vanishing weight {weight:.3e} in the target symmetry sector")]
    VanishingSupport { weight: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
