use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("degenerate normalization (norm squared {0:e})")]
    DegenerateNorm(f64),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outcome has vanishing probability ({0:e})")]
    ZeroProbability(f64),

    #[error("{0} is not supported for this state family; use the Fock-space oracle")]
    Unsupported(&'static str),

    #[error("truncation dimension {dim} too small: trace leakage {leakage:e}")]
    Truncation { dim: usize, leakage: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid moments matrix: {0}")]
    InvalidMoments(String),

    #[error("witness expectation has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("grid is empty")]
    EmptyGrid,

    #[error("oracle did not converge up to dimension {0}")]
    NoConvergence(usize),

    #[error("state descriptor: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
