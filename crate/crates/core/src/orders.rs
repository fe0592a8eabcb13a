//! Setwise domination, convex order and extended convex order, decided on
//! potentials.

use serde::{Deserialize, Serialize};

use crate::measure::Measure;
use crate::piecewise::PiecewisePoly;
use crate::potential::{call_potential, put_potential};
use crate::tol::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub holds: bool,
    /// Worst slack found; negative when the relation fails.
    pub margin: f64,
    /// Location of the worst slack, when it is a point of the line.
    pub witness: Option<f64>,
    pub detail: String,
}

impl OrderReport {
    pub(crate) fn pass(margin: f64, detail: impl Into<String>) -> Self {
        OrderReport {
            holds: true,
            margin,
            witness: None,
            detail: detail.into(),
        }
    }

    pub(crate) fn fail(margin: f64, witness: Option<f64>, detail: impl Into<String>) -> Self {
        OrderReport {
            holds: false,
            margin,
            witness,
            detail: detail.into(),
        }
    }
}

/// Smallest value of `d` at its check points (breakpoints, interior
/// vertices of quadratic pieces, tails) as `(value, location)`. A tail
/// sloping down faster than `slope_tol` gives `−∞`.
pub fn min_on_checkpoints(d: &PiecewisePoly, slope_tol: f64) -> (f64, f64) {
    let breaks = d.breakpoints();
    let (sl, _) = d.left_tail();
    let (sr, _) = d.right_tail();
    let first = breaks.first().copied().unwrap_or(0.0);
    let last = breaks.last().copied().unwrap_or(0.0);
    if sl > slope_tol {
        return (f64::NEG_INFINITY, first - 1.0);
    }
    if sr < -slope_tol {
        return (f64::NEG_INFINITY, last + 1.0);
    }
    let mut best = (d.eval(first), first);
    for (i, q) in d.pieces().iter().enumerate() {
        let (lo, hi) = d.piece_interval(i);
        let pts = [lo, hi].into_iter().filter(|k| k.is_finite()).chain(q.vertex_in(lo, hi));
        for k in pts {
            let v = q.eval(k);
            if v < best.0 {
                best = (v, k);
            }
        }
    }
    best
}

fn dominance(d: &PiecewisePoly, tol: f64, what: &str) -> OrderReport {
    let (m, at) = min_on_checkpoints(d, tol);
    if m >= -tol {
        OrderReport::pass(m, format!("{what} holds"))
    } else {
        OrderReport::fail(m, Some(at), format!("{what} violated by {} at {at}", -m))
    }
}

/// `m1 ≤ m2` setwise: `P_{m2} − P_{m1}` convex.
pub fn leq_setwise(m1: &Measure, m2: &Measure) -> OrderReport {
    leq_setwise_with(m1, m2, &Tolerance::default())
}

pub fn leq_setwise_with(m1: &Measure, m2: &Measure, tol: &Tolerance) -> OrderReport {
    let d = put_potential(m2).sub(&put_potential(m1));
    let eps = tol.structural * (1.0 + m1.mass() + m2.mass());
    let (margin, at) = d.convexity_margin();
    let margin = margin.min(f64::MAX);
    if margin >= -eps {
        OrderReport::pass(margin, "difference of potentials is convex")
    } else {
        OrderReport::fail(margin, Some(at), format!("mass deficit {} near {at}", -margin))
    }
}

/// `m1 ≤_cx m2`: equal mass and mean and `P_{m1} ≤ P_{m2}`.
pub fn leq_convex(m1: &Measure, m2: &Measure) -> OrderReport {
    leq_convex_with(m1, m2, &Tolerance::default())
}

pub fn leq_convex_with(m1: &Measure, m2: &Measure, tol: &Tolerance) -> OrderReport {
    let dm = m2.mass() - m1.mass();
    if dm.abs() > tol.order {
        return OrderReport::fail(-dm.abs(), None, format!("masses differ by {dm}"));
    }
    let db = m2.mean() - m1.mean();
    if db.abs() > tol.order {
        return OrderReport::fail(-db.abs(), None, format!("first moments differ by {db}"));
    }
    dominance(&put_potential(m2).sub(&put_potential(m1)), tol.order, "put domination")
}

/// `m1 ≤_E m2`: both put and call potentials dominated. A nonnegative
/// convex function is a constant plus a mixture of calls and puts, so the
/// two one-sided families decide the order.
pub fn leq_extended(m1: &Measure, m2: &Measure) -> OrderReport {
    leq_extended_with(m1, m2, &Tolerance::default())
}

pub fn leq_extended_with(m1: &Measure, m2: &Measure, tol: &Tolerance) -> OrderReport {
    let puts = dominance(&put_potential(m2).sub(&put_potential(m1)), tol.order, "put domination");
    if !puts.holds {
        return puts;
    }
    let calls = dominance(&call_potential(m2).sub(&call_potential(m1)), tol.order, "call domination");
    if !calls.holds {
        return calls;
    }
    OrderReport::pass(puts.margin.min(calls.margin), "put and call domination hold")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::make_measure;

    const T: f64 = 1.0 / 3.0;

    fn mu_hat() -> Measure {
        make_measure(&[], &[(-1.0, -0.5, 0.5), (0.5, 1.0, 0.5)]).unwrap()
    }

    fn nu() -> Measure {
        Measure::uniform(-2.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn setwise_examples() {
        assert!(leq_setwise(&mu_hat().scale(0.25), &nu()).holds);
        assert!(!leq_setwise(&mu_hat().scale(0.5), &nu()).holds);
        let m = make_measure(&[(0.2, 1.0)], &[(-1.0, 1.0, 0.3)]).unwrap();
        assert!(leq_setwise(&m, &m).holds);
        let r = leq_setwise(&Measure::dirac(0.0, 1.0), &Measure::dirac(0.0, 0.5));
        assert!(!r.holds);
        assert_eq!(r.witness, Some(0.0));
    }

    #[test]
    fn convex_examples() {
        let mu = make_measure(&[(-1.0, 0.5), (1.0, 0.5)], &[]).unwrap();
        let nu3 = make_measure(&[(-2.0, T), (0.0, T), (2.0, T)], &[]).unwrap();
        assert!(leq_convex(&mu, &nu3).holds);
        assert!(leq_convex(&nu3, &nu3).holds);
        let xi = Measure::dirac(0.0, T);
        let s = make_measure(&[(-2.0, T / 2.0), (2.0, T / 2.0)], &[]).unwrap();
        assert!(leq_convex(&xi, &s).holds);
        assert!(!leq_convex(&s, &xi).holds);
        assert!(!leq_convex(&mu, &nu3.scale(0.5)).holds);
    }

    #[test]
    fn extended_examples() {
        let mu = mu_hat().restrict(-1.0, 0.6).unwrap();
        assert!(leq_extended(&mu, &nu()).holds);
        assert!(leq_extended(&Measure::zero(), &nu()).holds);
        assert!(!leq_extended(&nu(), &mu).holds);
        // same mass, larger spread on the left only
        assert!(!leq_extended(&Measure::dirac(3.0, 1.0), &nu()).holds);
    }

    #[test]
    fn checkpoint_minimum_sees_vertices() {
        use crate::piecewise::Quad;
        let d = PiecewisePoly::new(
            vec![0.0, 2.0],
            vec![Quad::ZERO, Quad::new(1.0, -2.0, 0.0), Quad::ZERO],
        )
        .unwrap();
        let (v, at) = min_on_checkpoints(&d, 1e-10);
        assert_eq!((v, at), (-1.0, 1.0));
    }
}
