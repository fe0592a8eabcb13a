//! Put, call and classical potentials of a measure, their inversion, and
//! classification of potential functions by asymptotic slope and offset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, Measure, Segment};
use crate::piecewise::{PiecewisePoly, Quad};
use crate::tol::{Tolerance, EPS_STRUCT};

/// `(α, β)` such that a potential `f` satisfies `f(k) → 0` as `k → −∞`
/// and `f(k) − (αk − β) → 0` as `k → ∞`. For `P_η` this is
/// (mass, first moment).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialClass {
    pub alpha: f64,
    pub beta: f64,
}

/// `P_η(k) = ∫ (k − x)⁺ η(dx)`, built in closed form piece by piece.
pub fn put_potential(m: &Measure) -> PiecewisePoly {
    let breaks = m.breakpoints();
    if breaks.is_empty() {
        return PiecewisePoly::zero();
    }
    let atoms = m.atoms();
    let segs = m.segments();
    let (mut ai, mut si_start, mut si_end) = (0, 0, 0);
    let mut active = 0usize;
    let (mut qa, mut qb, mut qc) = (0.0, 0.0, 0.0);
    let mut pieces = Vec::with_capacity(breaks.len() + 1);
    pieces.push(Quad::ZERO);
    // Segments are sorted with disjoint interiors, so ends are in the same
    // order as starts.
    for &x in &breaks {
        while ai < atoms.len() && atoms[ai].x == x {
            let Atom { x, w } = atoms[ai];
            qb += w;
            qc -= w * x;
            ai += 1;
        }
        while si_end < segs.len() && segs[si_end].b == x {
            let s: Segment = segs[si_end];
            let d = s.density();
            qa -= 0.5 * d;
            qb += d * s.a;
            qc -= 0.5 * d * s.a * s.a;
            qb += s.w;
            qc -= s.w * s.center();
            active -= 1;
            si_end += 1;
        }
        while si_start < segs.len() && segs[si_start].a == x {
            let s = segs[si_start];
            let d = s.density();
            qa += 0.5 * d;
            qb -= d * s.a;
            qc += 0.5 * d * s.a * s.a;
            active += 1;
            si_start += 1;
        }
        if active == 0 {
            qa = 0.0;
        }
        pieces.push(Quad::new(qa, qb, qc));
    }
    let last = pieces.len() - 1;
    pieces[last].a = 0.0;
    PiecewisePoly::from_raw(breaks, pieces)
}

/// `C_η(k) = ∫ (x − k)⁺ η(dx) = P_η(k) + η̄ − η(ℝ)k`.
pub fn call_potential(m: &Measure) -> PiecewisePoly {
    put_potential(m).add_affine(-m.mass(), m.mean())
}

/// `U_η(k) = −∫ |k − x| η(dx) = −(C_η + P_η)`.
pub fn u_potential(m: &Measure) -> PiecewisePoly {
    let p = put_potential(m);
    p.add(&p).scale(-1.0).add_affine(m.mass(), -m.mean())
}

/// Recovers the unique measure whose put potential is `f`: density `2a`
/// on every quadratic piece and an atom of the slope jump at each kink.
pub fn measure_from_potential(f: &PiecewisePoly) -> Result<Measure> {
    let (sl, cl) = f.left_tail();
    let (sr, _) = f.right_tail();
    let scale = 1.0 + sr.abs() + f.breakpoints().iter().fold(0.0f64, |acc, x| acc.max(x.abs())) * sr.abs();
    if sl.abs() > 1e3 * EPS_STRUCT * (1.0 + sr.abs()) || cl.abs() > 1e3 * EPS_STRUCT * scale {
        return Err(Error::NotPotential(format!("left tail {sl}·k + {cl} is not identically zero")));
    }
    if sr < -1e3 * EPS_STRUCT {
        return Err(Error::NotPotential(format!("negative asymptotic slope {sr}")));
    }
    let neg_tol = 1e3 * EPS_STRUCT * (1.0 + sr.abs());
    let mut atoms = Vec::new();
    for (x, jump) in f.kinks() {
        if jump < -neg_tol {
            return Err(Error::NotConvex(x));
        }
        if jump.abs() > EPS_STRUCT {
            atoms.push(Atom { x, w: jump });
        }
    }
    let mut segments = Vec::new();
    let pieces = f.pieces();
    for (i, q) in pieces.iter().enumerate().take(pieces.len() - 1).skip(1) {
        let (lo, hi) = f.piece_interval(i);
        let density = 2.0 * q.a;
        if density < -neg_tol {
            return Err(Error::NotConvex(0.5 * (lo + hi)));
        }
        if density.abs() > EPS_STRUCT && density * (hi - lo) > EPS_STRUCT {
            segments.push(Segment {
                a: lo,
                b: hi,
                w: density * (hi - lo),
            });
        }
    }
    Ok(Measure::from_parts_unchecked(atoms, segments))
}

/// Reads `(α, β)` off the tails after checking the left tail vanishes.
pub fn classify(f: &PiecewisePoly) -> Result<PotentialClass> {
    classify_with(f, &Tolerance::default())
}

pub fn classify_with(f: &PiecewisePoly, tol: &Tolerance) -> Result<PotentialClass> {
    let (sl, cl) = f.left_tail();
    if sl.abs() > tol.order || cl.abs() > tol.order {
        return Err(Error::NotPotential(format!("left tail {sl}·k + {cl} is not identically zero")));
    }
    let (alpha, c) = f.right_tail();
    if alpha < -tol.order {
        return Err(Error::NotPotential(format!("negative asymptotic slope {alpha}")));
    }
    let beta = -c;
    if alpha.abs() <= tol.order && beta.abs() > tol.order {
        return Err(Error::NotPotential(format!("zero slope with offset {beta}")));
    }
    Ok(PotentialClass {
        alpha: alpha.max(0.0),
        beta,
    })
}
