use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label index {label} (label set has {num_labels} labels)")]
    InvalidLabel { label: usize, num_labels: usize },

    #[error("unknown label name {0:?}")]
    UnknownLabelName(String),

    #[error("symbol {0} is not a member of the alphabet")]
    InvalidSymbol(i64),

    #[error("symbol index {index} out of range for an alphabet of size {size}")]
    SymbolIndexOutOfRange { index: usize, size: usize },

    #[error("empty feature vector")]
    EmptyVector,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("Minkowski order must satisfy r >= 1 (got {0})")]
    InvalidOrder(f64),

    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("at least two labels are required (got {0})")]
    TooFewLabels(usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid training set: {0}")]
    InvalidTrainingSet(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("instance too large for exhaustive enumeration: {terms:.3e} weighted terms (limit {limit:.0e})")]
    InstanceTooLarge { terms: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the file system rather than by the inputs.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}
