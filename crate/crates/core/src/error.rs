use alloc::string::String;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("bad diagonal entry at index {0}")]
    BadDiagonal(usize),
    #[error("entry ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
    #[error("row {0} does not attain the maximal value")]
    NotAntipodal(usize),
    #[error("need at least {needed} points, got {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("entry ({0}, {1}) is not finite")]
    NotFinite(usize, usize),
    #[error("indices are not pairwise distinct")]
    NotDistinct,
    #[error("index {0} out of bounds")]
    IndexOutOfBounds(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("functions are not Moebius equivalent (pair ({0}, {1}))")]
    NotMoebiusEquivalent(usize, usize),
    #[error("relation is not admissible")]
    NotAdmissible,
    #[error("point is not a member of the Moebius space")]
    NotMember,
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("radius {r} is below the stable radius {r_tilde}")]
    RadiusTooSmall { r: f64, r_tilde: f64 },
    #[error("triangle inequality fails for ({0}, {1}, {2})")]
    TriangleViolation(usize, usize, usize),
    #[error("off-diagonal entry ({0}, {1}) is not positive")]
    NotPositive(usize, usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("counterexample found: {0}")]
    CounterexampleFound(String),
    #[error("matrix is not a separating function")]
    NotSeparating,
    #[error("the two functions lie in the same Moebius class")]
    SameClass,
    #[error("operation requires exactly four points, got {0}")]
    NotFour(usize),
    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = core::result::Result<T, Error>;
