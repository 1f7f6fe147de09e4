use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum CtError {
    /// Argument outside the documented support envelope (order too far into
    /// the complex plane, non-positive x, overflowing evaluation, ...).
    #[error("out of range: {0}")]
    Range(String),

    /// Coincident points where distinct ones are required.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// Evaluation too close to a pole of the underlying formula.
    #[error("pole proximity: {0}")]
    Pole(String),

    /// Linear system condition number beyond the trusted envelope.
    #[error("ill-conditioned system (cond ~ {cond:.3e}): {context}")]
    IllConditioned { cond: f64, context: String },

    /// Numerically singular linear system.
    #[error("singular linear system: {0}")]
    Singular(String),

    /// Channel set has the wrong parity for the requested operation.
    #[error("parity mismatch: {0}")]
    Parity(String),

    /// Malformed input that violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Asymptotic matching of a wave function failed.
    #[error("matching failed: {0}")]
    Matching(String),
}

impl CtError {
    pub fn is_pole(&self) -> bool {
        matches!(self, CtError::Pole(_))
    }
}
