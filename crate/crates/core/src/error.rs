use thiserror::Error;

/// Errors raised by measure construction and the shadow machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid weight {0}: weights must be positive")]
    InvalidWeight(f64),
    #[error("invalid segment [{0}, {1}]: left endpoint must be below right endpoint")]
    InvalidSegment(f64, f64),
    #[error("non-finite input value")]
    NonFinite,
    #[error("empty interval: {0} > {1}")]
    EmptyInterval(f64, f64),
    #[error("subtrahend is not dominated by the minuend (near {0})")]
    NotDominated(f64),
    #[error("quantile level {level} outside [0, {mass}]")]
    OutOfRange { level: f64, mass: f64 },
    #[error("function is not convex near {0}")]
    NotConvex(f64),
    #[error("function is not a potential: {0}")]
    NotPotential(String),
    #[error("evaluation point {y} outside chord [{x}, {z}]")]
    OutOfChord { x: f64, z: f64, y: f64 },
    #[error("function has no affine minorant (left slope {left} > right slope {right})")]
    UnboundedBelow { left: f64, right: f64 },
    #[error("measures are not in extended convex order (witness {0})")]
    NotExtendedOrder(f64),
    #[error("measures are not in convex order: {0}")]
    NotConvexOrder(String),
    #[error("convex hull construction failed: {0}")]
    HullFailure(String),
    #[error("bisection did not converge: mean gap {0}")]
    NoConvergence(f64),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unsupported cost: {0}")]
    UnsupportedCost(String),
}

pub type Result<T> = std::result::Result<T, Error>;
