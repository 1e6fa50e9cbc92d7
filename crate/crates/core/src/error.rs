use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("degenerate ansatz: {0}")]
    DegenerateAnsatz(String),

    #[error("degenerate likelihood state: {0}")]
    DegenerateLikelihood(String),

    #[error("degenerate posterior: {0}")]
    DegeneratePosterior(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("rescale error: {0}")]
    Rescale(String),

    #[error("generator error: {0}")]
    Generator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by numerically degenerate states or weights.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateAnsatz(_) | Error::DegenerateLikelihood(_) | Error::DegeneratePosterior(_))
    }

    /// True for failures caused by input data or files.
    pub fn is_data(&self) -> bool {
        matches!(self, Error::Data(_) | Error::Parse { .. } | Error::Rescale(_) | Error::Generator(_) | Error::Io(_))
    }
}
