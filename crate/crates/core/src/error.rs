use thiserror::Error;

/// Failures raised by the boundary calculus and the cavity models.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// `I - V` cannot be inverted: the boundary unitary is not gapped.
    #[error("not invertible: {reason}; offending eigenvalues {eigenvalues:?}")]
    NotInvertible {
        reason: String,
        eigenvalues: Vec<(f64, f64)>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("constraint inconsistency: {0}")]
    ConstraintInconsistency(String),

    #[error("quadrature domain error: {0}")]
    QuadratureDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
