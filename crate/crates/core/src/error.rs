use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input for {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("register of {0} qubits exceeds the supported maximum of {max}", max = crate::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("negative decay factor {0}; the dephasing channel requires gamma >= 0")]
    NegativeGamma(f64),

    #[error("divergent quantity at gamma = 0: {0}")]
    Divergent(&'static str),

    #[error("series not converged at n_max = {n_max}: relative tail {rel_tail:e} > rel_tol {rel_tol:e}")]
    NotConverged {
        n_max: u32,
        rel_tail: f64,
        rel_tol: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("closed form {closed} and spectral value {spectral} disagree (relative error {rel:e})")]
    ClosedFormMismatch { closed: f64, spectral: f64, rel: f64 },

    #[error("POVM is not complete (max deviation from identity {0:e})")]
    IncompletePovm(f64),

    #[error("POVM element {0} is not positive semidefinite")]
    NonPositiveElement(usize),

    #[error("empty range")]
    EmptyRange,

    #[error("Fisher information is zero; variance bound is infinite")]
    InfiniteVariance,
}

pub type Result<T> = std::result::Result<T, Error>;
