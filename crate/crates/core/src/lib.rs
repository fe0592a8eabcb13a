//! Potential-function toolkit for finite measures on the line: shadows,
//! counter-shadows, convex envelopes, convex-type orders and
//! shadow-based martingale couplings.
//!
//! Measures are finite sums of atoms and uniform pieces, so every
//! potential is piecewise quadratic and all operations are exact up to
//! floating point.

// `!(a < b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coupling;
pub mod envelope;
pub mod error;
pub mod measure;
pub mod orders;
pub mod piecewise;
pub mod potential;
pub mod shadow;
pub mod tol;

pub use envelope::{chord, convex_hull, convex_hull_detailed, convex_hull_oracle, Hull};
pub use error::{Error, Result};
pub use measure::{make_measure, Atom, Measure, Segment};
pub use orders::{leq_convex, leq_extended, leq_setwise, OrderReport};
pub use piecewise::{PiecewisePoly, Quad};
pub use potential::{call_potential, classify, measure_from_potential, put_potential, u_potential, PotentialClass};
pub use shadow::{counter_shadow, counter_shadow_quantile, shadow};
pub use tol::Tolerance;
