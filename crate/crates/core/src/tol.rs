//! Numerical tolerances shared by every module.

/// Absolute tolerance for structural comparisons: atom and density dust,
/// continuity of piecewise functions, snapping of tangency points.
pub const EPS_STRUCT: f64 = 1e-12;

/// Absolute tolerance on potential comparisons used by the order predicates.
pub const TOL_ORDER: f64 = 1e-10;

/// Tolerance set threaded through the operations that accept one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub structural: f64,
    pub order: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            structural: EPS_STRUCT,
            order: TOL_ORDER,
        }
    }
}

impl Tolerance {
    /// Both tolerances set to the same value (the CLI `--tol` flag).
    pub fn uniform(tol: f64) -> Self {
        Tolerance {
            structural: tol,
            order: tol,
        }
    }
}
