use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric at ({i},{j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("vector annihilated: norm underflow during normalization")]
    VectorAnnihilated,

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("jacobi sweep limit reached before off-diagonal target")]
    JacobiNoConvergence,

    #[error("rank collapse in iteration block")]
    RankCollapse,

    #[error("sample stream exhausted (one-pass mode)")]
    StreamExhausted,

    #[error("isolated point: affinity row {0} sums to zero")]
    IsolatedPoint(usize),

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
