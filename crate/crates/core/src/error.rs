use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    Hermiticity { residual: f64 },

    #[error("argument out of range: {0}")]
    Range(&'static str),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("not a density matrix: {0}")]
    InvalidState(&'static str),

    #[error("operator violates trace preservation (residual {residual:e})")]
    NotTracePreserving { residual: f64 },
}
