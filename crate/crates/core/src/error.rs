use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not skew-symmetrizable: offending pair ({i},{j})")]
    NotSkewSymmetrizable { i: usize, j: usize },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("automorphism not admissible: violated by pair ({i},{j})")]
    NotAdmissible { i: usize, j: usize },
    #[error("matrix is not acyclic of affine type")]
    NotAcyclicAffine,
    #[error("matrix is not of affine type (classified as {got})")]
    NotAffine { got: String },
    #[error("matrix is not neighboring")]
    NotNeighboring,
    #[error("neighboring structure violation: {clause}")]
    StructureViolation { clause: String },
    #[error("mutation index {index} must avoid the affine pair")]
    AffineIndexInSequence { index: usize },
    #[error("inconsistent internal state: {0}")]
    Internal(String),
    #[error("point does not project to the imaginary wall")]
    OffWall,
    #[error("search budget of {cap} exhausted")]
    BudgetExhausted { cap: usize },
    #[error("direction mismatch: segment is not a nonnegative multiple of step")]
    DirectionMismatch,
    #[error("cannot certify: {reason}; the result is a residual region, not a point or segment")]
    NotCertified { reason: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
