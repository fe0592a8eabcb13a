//! Continuous piecewise polynomials of degree at most two with affine tails.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::EPS_STRUCT;

/// `a·k² + b·k + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quad {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad { a: 0.0, b: 0.0, c: 0.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Quad {
        Quad { a, b, c }
    }

    /// The line through `(x, y)` with slope `s`.
    pub fn line(s: f64, x: f64, y: f64) -> Quad {
        Quad { a: 0.0, b: s, c: y - s * x }
    }

    pub fn eval(&self, k: f64) -> f64 {
        (self.a * k + self.b) * k + self.c
    }

    pub fn slope(&self, k: f64) -> f64 {
        2.0 * self.a * k + self.b
    }

    pub fn add(&self, o: &Quad) -> Quad {
        Quad::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }

    pub fn sub(&self, o: &Quad) -> Quad {
        Quad::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }

    pub fn scale(&self, u: f64) -> Quad {
        Quad::new(self.a * u, self.b * u, self.c * u)
    }

    /// Extremum of the quadratic inside the open interval `(lo, hi)`, or None.
    pub fn vertex_in(&self, lo: f64, hi: f64) -> Option<f64> {
        if self.a == 0.0 {
            return None;
        }
        let v = -self.b / (2.0 * self.a);
        (v > lo && v < hi).then_some(v)
    }

    /// Real roots strictly inside `(lo, hi)`, ascending. Double roots are
    /// reported once; identically zero quadratics have no roots.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(2);
        let scale = self.a.abs().max(self.b.abs()).max(self.c.abs());
        if scale == 0.0 {
            return out;
        }
        if self.a.abs() <= EPS_STRUCT * scale {
            if self.b != 0.0 {
                out.push(-self.c / self.b);
            }
        } else {
            let disc = self.b * self.b - 4.0 * self.a * self.c;
            if disc < 0.0 {
                if disc.abs() <= EPS_STRUCT * self.b * self.b {
                    out.push(-self.b / (2.0 * self.a));
                }
            } else {
                let sq = disc.sqrt();
                let q = -0.5 * (self.b + self.b.signum() * sq);
                if q == 0.0 {
                    out.push(0.0);
                } else {
                    out.push(q / self.a);
                    out.push(self.c / q);
                }
            }
        }
        out.retain(|r| r.is_finite() && *r > lo && *r < hi);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Continuous piecewise quadratic: `pieces[i]` applies on
/// `[breaks[i-1], breaks[i])`, with the first and last pieces the unbounded
/// tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Quad>,
}

impl PiecewisePoly {
    /// Validates strict monotonicity of breakpoints, affine tails and
    /// continuity at every breakpoint (relative to the local magnitude).
    pub fn new(breaks: Vec<f64>, pieces: Vec<Quad>) -> Result<PiecewisePoly> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::NotPotential(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breaks.len()
            )));
        }
        if breaks.iter().chain(pieces.iter().flat_map(|q| [&q.a, &q.b, &q.c])).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotPotential("breakpoints not strictly increasing".into()));
        }
        if pieces[0].a != 0.0 || pieces[pieces.len() - 1].a != 0.0 {
            return Err(Error::NotPotential("tails must be affine".into()));
        }
        let f = PiecewisePoly { breaks, pieces };
        for (i, &x) in f.breaks.iter().enumerate() {
            let l = f.pieces[i].eval(x);
            let r = f.pieces[i + 1].eval(x);
            let scale = 1.0 + l.abs().max(r.abs()) + x.abs() * (f.pieces[i].b.abs() + f.pieces[i + 1].b.abs());
            if (l - r).abs() > 1e3 * EPS_STRUCT * scale {
                return Err(Error::NotPotential(format!("jump {} at {}", r - l, x)));
            }
        }
        Ok(f)
    }

    pub(crate) fn from_raw(breaks: Vec<f64>, pieces: Vec<Quad>) -> PiecewisePoly {
        debug_assert_eq!(pieces.len(), breaks.len() + 1);
        PiecewisePoly { breaks, pieces }
    }

    pub fn zero() -> PiecewisePoly {
        PiecewisePoly::affine(0.0, 0.0)
    }

    /// `k ↦ slope·k + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> PiecewisePoly {
        PiecewisePoly {
            breaks: Vec::new(),
            pieces: vec![Quad::new(0.0, slope, intercept)],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Quad] {
        &self.pieces
    }

    /// Domain of piece `i` (tails are unbounded).
    pub fn piece_interval(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.breaks[i - 1] };
        let hi = if i == self.breaks.len() { f64::INFINITY } else { self.breaks[i] };
        (lo, hi)
    }

    /// Index of the piece used to evaluate at `k` (right piece at breakpoints).
    pub fn piece_index(&self, k: f64) -> usize {
        self.breaks.partition_point(|&x| x <= k)
    }

    pub fn eval(&self, k: f64) -> f64 {
        self.pieces[self.piece_index(k)].eval(k)
    }

    /// Left tail `(slope, intercept)`.
    pub fn left_tail(&self) -> (f64, f64) {
        let q = self.pieces[0];
        (q.b, q.c)
    }

    /// Right tail `(slope, intercept)`.
    pub fn right_tail(&self) -> (f64, f64) {
        let q = self.pieces[self.pieces.len() - 1];
        (q.b, q.c)
    }

    /// Slope jumps `f'(x+) − f'(x−)` at each breakpoint.
    pub fn kinks(&self) -> Vec<(f64, f64)> {
        self.breaks
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, self.pieces[i + 1].slope(x) - self.pieces[i].slope(x)))
            .collect()
    }

    /// Common refinement of both breakpoint sets. Breakpoints closer than
    /// the snapping tolerance are treated as one (keeping `self`'s value), so
    /// rounding noise does not create sliver pieces. Each entry records which
    /// operand advances past it.
    fn merged_breaks(&self, other: &PiecewisePoly) -> Vec<(f64, bool, bool)> {
        let mut xs = Vec::with_capacity(self.breaks.len() + other.breaks.len());
        let (mut i, mut j) = (0, 0);
        while i < self.breaks.len() || j < other.breaks.len() {
            let next = match (self.breaks.get(i), other.breaks.get(j)) {
                (Some(&x), Some(&y)) if snaps(x, y) => (x, true, true),
                (Some(&x), Some(&y)) if x < y => (x, true, false),
                (Some(_), Some(&y)) => (y, false, true),
                (Some(&x), None) => (x, true, false),
                (None, Some(&y)) => (y, false, true),
                (None, None) => unreachable!(),
            };
            i += next.1 as usize;
            j += next.2 as usize;
            xs.push(next);
        }
        xs
    }

    /// Applies `op` piecewise on the common refinement of both breakpoint sets.
    fn combine(&self, other: &PiecewisePoly, op: impl Fn(&Quad, &Quad) -> Quad) -> PiecewisePoly {
        let d = self.sub_raw(other);
        let pieces = d.sources.iter().map(|(f, g)| op(f, g)).collect();
        PiecewisePoly { breaks: d.breaks, pieces }.simplified()
    }

    pub fn add(&self, other: &PiecewisePoly) -> PiecewisePoly {
        self.combine(other, Quad::add)
    }

    pub fn sub(&self, other: &PiecewisePoly) -> PiecewisePoly {
        self.combine(other, Quad::sub)
    }

    pub fn scale(&self, u: f64) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|q| q.scale(u)).collect(),
        }
        .simplified()
    }

    pub fn add_affine(&self, slope: f64, intercept: f64) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|q| Quad::new(q.a, q.b + slope, q.c + intercept))
                .collect(),
        }
    }

    /// Pointwise minimum. Pieces are split where the two functions cross;
    /// tangential contacts do not split.
    pub fn min(&self, other: &PiecewisePoly) -> PiecewisePoly {
        let diff = self.sub_raw(other);
        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        for i in 0..diff.pieces.len() {
            let (lo, hi) = diff.piece_interval(i);
            let d = diff.pieces[i];
            let mut cuts = vec![lo];
            cuts.extend(d.roots_in(lo, hi));
            cuts.push(hi);
            for w in cuts.windows(2) {
                let probe = match (w[0].is_finite(), w[1].is_finite()) {
                    (true, true) => 0.5 * (w[0] + w[1]),
                    (false, true) => w[1] - 1.0,
                    (true, false) => w[0] + 1.0,
                    (false, false) => 0.0,
                };
                let (f_piece, g_piece) = diff.sources[i];
                let q = if d.eval(probe) <= 0.0 { f_piece } else { g_piece };
                if w[0].is_finite() {
                    breaks.push(w[0]);
                }
                pieces.push(q);
            }
        }
        PiecewisePoly { breaks, pieces }.simplified()
    }

    fn sub_raw(&self, other: &PiecewisePoly) -> SourcedDiff {
        let merged = self.merged_breaks(other);
        let mut breaks = Vec::with_capacity(merged.len());
        let mut pieces = Vec::with_capacity(merged.len() + 1);
        let mut sources = Vec::with_capacity(merged.len() + 1);
        let (mut i, mut j) = (0, 0);
        for k in 0..=merged.len() {
            pieces.push(self.pieces[i].sub(&other.pieces[j]));
            sources.push((self.pieces[i], other.pieces[j]));
            if let Some(&(x, di, dj)) = merged.get(k) {
                breaks.push(x);
                i += di as usize;
                j += dj as usize;
            }
        }
        SourcedDiff { breaks, pieces, sources }
    }

    /// Removes breakpoints between identical neighbouring pieces.
    pub fn simplified(mut self) -> PiecewisePoly {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut pieces = Vec::with_capacity(self.pieces.len());
        pieces.push(self.pieces[0]);
        for (i, &x) in self.breaks.iter().enumerate() {
            let next = self.pieces[i + 1];
            if *pieces.last().unwrap() == next {
                continue;
            }
            breaks.push(x);
            pieces.push(next);
        }
        self.breaks = breaks;
        self.pieces = pieces;
        self
    }

    /// Infimum over ℝ and a minimiser (`-∞` when a tail decreases without
    /// bound, with the witness placed beyond the last breakpoint).
    pub fn infimum(&self) -> (f64, f64) {
        let (sl, _) = self.left_tail();
        let (sr, _) = self.right_tail();
        let first = self.breaks.first().copied().unwrap_or(0.0);
        let last = self.breaks.last().copied().unwrap_or(0.0);
        if sl > 0.0 {
            return (f64::NEG_INFINITY, first - 1.0);
        }
        if sr < 0.0 {
            return (f64::NEG_INFINITY, last + 1.0);
        }
        let mut best = (self.eval(first), first);
        let mut consider = |k: f64, v: f64| {
            if v < best.0 {
                best = (v, k);
            }
        };
        for (i, q) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_interval(i);
            if lo.is_finite() {
                consider(lo, q.eval(lo));
            }
            if hi.is_finite() {
                consider(hi, q.eval(hi));
            }
            if let Some(v) = q.vertex_in(lo, hi) {
                consider(v, q.eval(v));
            }
        }
        best
    }

    /// `sup |f|`; infinite when a tail is not flat up to `EPS_STRUCT`.
    pub fn sup_abs(&self) -> f64 {
        let (sl, _) = self.left_tail();
        let (sr, _) = self.right_tail();
        if sl.abs() > EPS_STRUCT || sr.abs() > EPS_STRUCT {
            return f64::INFINITY;
        }
        let mut best = self.pieces[0].c.abs().max(self.pieces[self.pieces.len() - 1].c.abs());
        for (i, q) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_interval(i);
            for k in [lo, hi].into_iter().filter(|k| k.is_finite()).chain(q.vertex_in(lo, hi)) {
                best = best.max(q.eval(k).abs());
            }
        }
        best
    }

    /// Most negative curvature evidence: returns `(margin, location)` where
    /// a negative margin is either `2a` of a concave piece or a downward
    /// slope jump.
    pub fn convexity_margin(&self) -> (f64, f64) {
        let mut worst = (f64::INFINITY, 0.0);
        for (i, q) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.piece_interval(i);
            if lo.is_finite() && hi.is_finite() && 2.0 * q.a < worst.0 {
                worst = (2.0 * q.a, 0.5 * (lo + hi));
            }
        }
        for (x, jump) in self.kinks() {
            if jump < worst.0 {
                worst = (jump, x);
            }
        }
        worst
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.convexity_margin().0 >= -tol
    }

    /// Samples on a grid.
    pub fn sample(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&k| self.eval(k)).collect()
    }
}

/// Breakpoints this close are the same point up to rounding.
pub(crate) fn snaps(x: f64, y: f64) -> bool {
    (x - y).abs() <= EPS_STRUCT * x.abs().max(y.abs()).max(1.0)
}

struct SourcedDiff {
    breaks: Vec<f64>,
    pieces: Vec<Quad>,
    sources: Vec<(Quad, Quad)>,
}

impl SourcedDiff {
    fn piece_interval(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.breaks[i - 1] };
        let hi = if i == self.breaks.len() { f64::INFINITY } else { self.breaks[i] };
        (lo, hi)
    }
}
