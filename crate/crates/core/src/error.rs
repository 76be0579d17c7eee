use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or index ranges do not line up (tensor ranks, row lengths, factor counts).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Two objects that must live on the same space do not.
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    /// Masses are negative, non-finite, or fail normalization.
    #[error("invalid probability data: {0}")]
    InvalidMeasure(String),

    /// Conditioning on a zero-mass point without a declared default row.
    #[error("degenerate conditioning: {0}")]
    DegenerateConditioning(String),

    /// An enumeration would exceed its documented size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The simplex solver could not recover from a numerically singular basis,
    /// or exceeded its iteration budget. Distinct from an infeasible program,
    /// which is a normal solution status.
    #[error("linear program solver failure: {0}")]
    SolverFailure(String),

    /// A computed certificate violated its own invariant (for example a
    /// duality gap beyond tolerance).
    #[error("internal consistency violation: {0}")]
    Internal(String),

    /// Model or game file could not be parsed or validated.
    #[error("parse error: {0}")]
    Parse(String),

    /// Any other invalid argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
