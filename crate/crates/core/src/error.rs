use thiserror::Error;

/// Errors produced by operator and solver entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("form degree {got} out of range {min}..={max}")]
    FormDegreeOutOfRange { min: usize, max: usize, got: usize },

    #[error("input form is not closed: residual = {residual}, norm^2 = {residual_norm_sq}")]
    NotClosed {
        residual: String,
        residual_norm_sq: f64,
    },

    #[error("operator has a non-constant coefficient in term `{term}`")]
    NonConstantCoefficient { term: String },

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown symbol `{symbol}` at byte {position}")]
    UnknownSymbol { symbol: String, position: usize },

    #[error("commutator form not positive on the window: lambda_min = {lambda_min}")]
    NonPositiveCertificate { lambda_min: f64 },

    #[error("solver did not converge: residual history {history:?}")]
    NonConvergence { history: Vec<f64> },

    #[error("0 lies in the spectrum of the Laplacian at p = 0; no bounded inverse exists")]
    ZeroEigenvalue,

    #[error("invalid weight: {0}")]
    InvalidWeight(String),
}

pub type Result<T> = std::result::Result<T, Error>;
