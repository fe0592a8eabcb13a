//! Largest convex minorant of a continuous piecewise-quadratic function
//! with affine tails.
//!
//! The sweep treats the graph as a left-to-right sequence of convex
//! elements: the strictly convex pieces (arcs) and the breakpoints not
//! covered by an arc. Concave and affine pieces can only touch the
//! envelope at their endpoints, so they contribute nothing else. A stack
//! of surviving elements is maintained as in a monotone-chain hull; the
//! link between consecutive elements is their common lower tangent
//! (bridge). The two tails enter as rays of fixed slope at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{PiecewisePoly, Quad};
use crate::tol::{EPS_STRUCT, TOL_ORDER};

/// Maximum violation of `f − f^c` still counted as contact.
pub const CONTACT_TOL: f64 = 1e-11;

/// Linear interpolation of `f` between `(x, f(x))` and `(z, f(z))` at `y`.
pub fn chord(f: &PiecewisePoly, x: f64, z: f64, y: f64) -> Result<f64> {
    if !(x <= y && y <= z) {
        return Err(Error::OutOfChord { x, z, y });
    }
    if x == z {
        return Ok(f.eval(x));
    }
    let (fx, fz) = (f.eval(x), f.eval(z));
    Ok(fx * ((z - y) / (z - x)) + fz * ((y - x) / (z - x)))
}

/// Convex envelope together with its contact structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hull {
    pub function: PiecewisePoly,
    /// Maximal open intervals on which the envelope is affine and lies
    /// strictly below `f`. Infinite endpoints are possible.
    pub gaps: Vec<(f64, f64)>,
    /// Closed intervals (possibly single points) where envelope and `f`
    /// coincide; the complement of `gaps`.
    pub contact: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
enum Elem {
    Point { x: f64, y: f64 },
    Arc { q: Quad, lo: f64, hi: f64 },
}

impl Elem {
    fn left(&self) -> f64 {
        match *self {
            Elem::Point { x, .. } => x,
            Elem::Arc { lo, .. } => lo,
        }
    }

    fn right(&self) -> f64 {
        match *self {
            Elem::Point { x, .. } => x,
            Elem::Arc { hi, .. } => hi,
        }
    }

    fn value(&self, t: f64) -> f64 {
        match *self {
            Elem::Point { y, .. } => y,
            Elem::Arc { q, .. } => q.eval(t),
        }
    }

    /// Point of the element supported by a line of slope `s`.
    fn touch(&self, s: f64) -> f64 {
        match *self {
            Elem::Point { x, .. } => x,
            Elem::Arc { q, lo, hi } => {
                let t = (s - q.b) / (2.0 * q.a);
                if t <= lo + EPS_STRUCT * (1.0 + lo.abs()) {
                    lo
                } else if t >= hi - EPS_STRUCT * (1.0 + hi.abs()) {
                    hi
                } else {
                    t
                }
            }
        }
    }

    /// `min_t (value(t) − s·t)`.
    fn intercept(&self, s: f64) -> f64 {
        let t = self.touch(s);
        self.value(t) - s * t
    }

    /// Slopes at which the support point switches regime.
    fn slope_breaks(&self) -> Option<[f64; 2]> {
        match *self {
            Elem::Point { .. } => None,
            Elem::Arc { q, lo, hi } => Some([q.slope(lo), q.slope(hi)]),
        }
    }

    /// Coefficients of `intercept(s0 + σ)` as `c2σ² + c1σ + c0`, valid on a
    /// slope interval where the regime probed at `s_mid` does not change.
    fn intercept_poly(&self, s0: f64, s_mid: f64) -> [f64; 3] {
        let t = self.touch(s_mid);
        match *self {
            Elem::Arc { q, lo, hi } if t > lo && t < hi => {
                let p = q.slope(lo);
                let u = s0 - p;
                let inv = 1.0 / (4.0 * q.a);
                [q.eval(lo) - s0 * lo - u * u * inv, -lo - 2.0 * u * inv, -inv]
            }
            _ => {
                let y = self.value(t);
                [y - s0 * t, -t, 0.0]
            }
        }
    }
}

/// Common lower tangent of two elements with `a` left of `b`:
/// `(slope, touch on a, touch on b)`.
fn bridge(a: &Elem, b: &Elem) -> (f64, f64, f64) {
    if let (Elem::Point { x: xa, y: ya }, Elem::Point { x: xb, y: yb }) = (*a, *b) {
        // point pair: plain chord, no tangency computation
        return ((yb - ya) / (xb - xa), xa, xb);
    }
    if let (Elem::Arc { q: qa, hi, .. }, Elem::Arc { q: qb, lo, .. }) = (*a, *b) {
        // adjacent arcs meeting without a downward kink: the graph is convex
        // across the junction and the gap function has a double root there
        let (sa, sb) = (qa.slope(hi), qb.slope(lo));
        if hi == lo && sa <= sb + EPS_STRUCT * (1.0 + sb.abs()) {
            return (sb.max(sa), hi, lo);
        }
    }
    let phi = |s: f64| a.intercept(s) - b.intercept(s);
    let mut cands: Vec<f64> = a
        .slope_breaks()
        .into_iter()
        .chain(b.slope_breaks())
        .flatten()
        .collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let vals: Vec<f64> = cands.iter().map(|&s| phi(s)).collect();
    let s = match vals.iter().position(|&v| v >= 0.0) {
        Some(0) => {
            let d = b.left() - a.left();
            if d > 0.0 {
                cands[0] - vals[0] / d
            } else {
                cands[0]
            }
        }
        None => {
            let last = cands.len() - 1;
            let d = b.right() - a.right();
            if d > 0.0 {
                cands[last] - vals[last] / d
            } else {
                cands[last]
            }
        }
        Some(i) => solve_bracket(a, b, cands[i - 1], cands[i], vals[i - 1], vals[i]),
    };
    (s, a.touch(s), b.touch(s))
}

/// Root of the nondecreasing gap function on `[s0, s1]` where
/// `phi(s0) < 0 ≤ phi(s1)`: closed form from the regime quadratic, with
/// bisection as fallback.
fn solve_bracket(a: &Elem, b: &Elem, s0: f64, s1: f64, v0: f64, v1: f64) -> f64 {
    let phi = |s: f64| a.intercept(s) - b.intercept(s);
    let mid = 0.5 * (s0 + s1);
    let pa = a.intercept_poly(s0, mid);
    let pb = b.intercept_poly(s0, mid);
    let q = Quad::new(pa[2] - pb[2], pa[1] - pb[1], pa[0] - pb[0]);
    let width = s1 - s0;
    let slack = 1e-9 * width.max(EPS_STRUCT);
    let worst = v0.abs().max(v1.abs());
    if let Some(&sigma) = q.roots_in(-slack, width + slack).first() {
        let mut s = s0 + sigma.clamp(0.0, width);
        let mut v = phi(s);
        // Newton polish: φ'(s) is the gap width between the touch points
        for _ in 0..4 {
            let d = b.touch(s) - a.touch(s);
            if v == 0.0 || d <= 0.0 {
                break;
            }
            let next = (s - v / d).clamp(s0, s1);
            let w = phi(next);
            if w.abs() >= v.abs() {
                break;
            }
            (s, v) = (next, w);
        }
        if v.abs() <= 1e-12 * (1.0 + worst) || v.abs() <= 1e-3 * worst {
            return s;
        }
    }
    let (mut lo, mut hi) = (s0, s1);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if phi(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy)]
struct Node {
    elem: Elem,
    s_in: f64,
    t_in: f64,
    t_out: f64,
}

fn elements(f: &PiecewisePoly) -> Vec<Elem> {
    let breaks = f.breakpoints();
    let pieces = f.pieces();
    let n = breaks.len();
    let is_arc = |i: usize| i >= 1 && i < n && pieces[i].a > EPS_STRUCT;
    let mut out = Vec::with_capacity(2 * n);
    for (j, &x) in breaks.iter().enumerate() {
        if !is_arc(j) && !is_arc(j + 1) {
            out.push(Elem::Point {
                x,
                y: pieces[j + 1].eval(x),
            });
        }
        if is_arc(j + 1) {
            out.push(Elem::Arc {
                q: pieces[j + 1],
                lo: x,
                hi: breaks[j + 1],
            });
        }
    }
    out
}

fn sweep(elems: &[Elem], s_left: f64, s_right: f64) -> Vec<Node> {
    let mut stack: Vec<Node> = Vec::with_capacity(elems.len());
    for &e in elems {
        loop {
            let Some(top) = stack.last_mut() else {
                stack.push(Node {
                    elem: e,
                    s_in: s_left,
                    t_in: e.touch(s_left),
                    t_out: f64::NAN,
                });
                break;
            };
            let (s, t_top, t_e) = bridge(&top.elem, &e);
            if s <= top.s_in {
                stack.pop();
                continue;
            }
            top.t_out = t_top;
            stack.push(Node {
                elem: e,
                s_in: s,
                t_in: t_e,
                t_out: f64::NAN,
            });
            break;
        }
    }
    while stack.len() > 1 && stack.last().is_some_and(|n| n.s_in >= s_right) {
        stack.pop();
    }
    if let Some(top) = stack.last_mut() {
        top.t_out = top.elem.touch(s_right);
    }
    stack
}

/// Envelope region between consecutive contact parts.
#[derive(Debug, Clone, Copy)]
struct Link {
    lo: f64,
    hi: f64,
    line: Quad,
}

fn assemble(nodes: &[Node], s_left: f64, s_right: f64) -> (PiecewisePoly, Vec<Link>) {
    // (start, piece) with nondecreasing starts; the first starts at −∞
    let mut starts: Vec<(f64, Quad)> = Vec::with_capacity(3 * nodes.len() + 2);
    let mut links = Vec::with_capacity(nodes.len() + 1);
    let first = nodes[0];
    let y0 = first.elem.value(first.t_in);
    let left_ray = Quad::line(s_left, first.t_in, y0);
    starts.push((f64::NEG_INFINITY, left_ray));
    links.push(Link {
        lo: f64::NEG_INFINITY,
        hi: first.t_in,
        line: left_ray,
    });
    for (i, node) in nodes.iter().enumerate() {
        if let Elem::Arc { q, .. } = node.elem {
            if node.t_out > node.t_in {
                starts.push((node.t_in, q));
            }
        }
        let y_out = node.elem.value(node.t_out);
        let (line, hi) = match nodes.get(i + 1) {
            // the tangency slope, not the chord: touch points can be
            // arbitrarily close and the chord then loses all precision
            Some(next) => (Quad::line(next.s_in, node.t_out, y_out), next.t_in),
            None => (Quad::line(s_right, node.t_out, y_out), f64::INFINITY),
        };
        starts.push((node.t_out, line));
        links.push(Link { lo: node.t_out, hi, line });
    }
    let mut breaks = Vec::with_capacity(starts.len());
    let mut pieces: Vec<Quad> = Vec::with_capacity(starts.len());
    for (x, q) in starts {
        match breaks.last() {
            None if pieces.is_empty() => pieces.push(q),
            _ => {
                let prev = breaks.last().copied().unwrap_or(f64::NEG_INFINITY);
                if x <= prev + EPS_STRUCT * (1.0 + x.abs()) {
                    // zero-length piece before this one
                    *pieces.last_mut().unwrap() = q;
                } else {
                    breaks.push(x);
                    pieces.push(q);
                }
            }
        }
    }
    // the last piece is the right ray, the first the left ray
    let n = pieces.len();
    pieces[0].a = 0.0;
    pieces[n - 1].a = 0.0;
    (PiecewisePoly::from_raw(breaks, pieces).simplified(), links)
}

/// `sup_{lo<k<hi} (f(k) − line(k))`; `+∞` if it grows along a tail.
fn max_excess(f: &PiecewisePoly, line: &Quad, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return f64::NEG_INFINITY;
    }
    let mut best = f64::NEG_INFINITY;
    let start = if lo.is_finite() { f.piece_index(lo) } else { 0 };
    for i in start..f.pieces().len() {
        let (plo, phi) = f.piece_interval(i);
        if plo >= hi {
            break;
        }
        let l = plo.max(lo);
        let h = phi.min(hi);
        if !(h > l) {
            continue;
        }
        let d = f.pieces()[i].sub(line);
        for k in [l, h] {
            if k.is_finite() {
                best = best.max(d.eval(k));
            } else {
                // affine tail of f against the line
                let toward = if k > 0.0 { d.b } else { -d.b };
                if toward > EPS_STRUCT {
                    return f64::INFINITY;
                }
            }
        }
        if let Some(v) = d.vertex_in(l, h) {
            best = best.max(d.eval(v));
        }
    }
    best
}

/// Largest convex minorant of `f`.
pub fn convex_hull(f: &PiecewisePoly) -> Result<PiecewisePoly> {
    convex_hull_detailed(f).map(|h| h.function)
}

/// Largest convex minorant of `f` with its contact set and affine gaps.
pub fn convex_hull_detailed(f: &PiecewisePoly) -> Result<Hull> {
    let (s_left, _) = f.left_tail();
    let (s_right, _) = f.right_tail();
    if s_left > s_right + TOL_ORDER * (1.0 + s_left.abs().max(s_right.abs())) {
        return Err(Error::UnboundedBelow {
            left: s_left,
            right: s_right,
        });
    }
    let s_right = s_right.max(s_left);
    if f.breakpoints().is_empty() {
        return Ok(Hull {
            function: f.clone(),
            gaps: Vec::new(),
            contact: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        });
    }
    let elems = elements(f);
    let nodes = sweep(&elems, s_left, s_right);
    if nodes.is_empty() {
        return Err(Error::HullFailure("no envelope elements".into()));
    }
    if nodes.iter().any(|n| !(n.t_in.is_finite() && n.t_out.is_finite())) {
        return Err(Error::HullFailure("non-finite tangency point".into()));
    }
    let (function, links) = assemble(&nodes, s_left, s_right);
    let scale = 1.0 + f.breakpoints().iter().map(|x| f.eval(*x).abs()).fold(0.0, f64::max);
    let gaps: Vec<(f64, f64)> = links
        .iter()
        .filter(|l| max_excess(f, &l.line, l.lo, l.hi) > CONTACT_TOL * scale)
        .map(|l| (l.lo, l.hi))
        .collect();
    let mut contact = Vec::with_capacity(gaps.len() + 1);
    let mut cursor = f64::NEG_INFINITY;
    for &(l, r) in &gaps {
        if l > cursor || (l == cursor && l.is_finite()) {
            contact.push((cursor, l));
        }
        cursor = r;
    }
    if cursor < f64::INFINITY {
        contact.push((cursor, f64::INFINITY));
    }
    contact.retain(|&(l, r)| !(l == f64::NEG_INFINITY && r == f64::NEG_INFINITY));
    Ok(Hull { function, gaps, contact })
}

/// Grid version of `f^c(y) = inf_{x ≤ y ≤ z} L^f_{x,z}(y)` with `x, z`
/// restricted to grid points. The infimum over grid chords is the lower
/// convex hull of the sampled points, computed here by a monotone chain.
pub fn convex_hull_oracle(f: &PiecewisePoly, grid: &[f64]) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = grid.iter().map(|&k| (k, f.eval(k))).collect();
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(pts.len());
    let mut j = 0;
    for &(k, _) in &pts {
        while j + 1 < hull.len() && hull[j + 1].0 < k {
            j += 1;
        }
        let (a, b) = (hull[j], hull[(j + 1).min(hull.len() - 1)]);
        if k <= a.0 || b.0 == a.0 {
            out.push(a.1);
        } else {
            let w = (k - a.0) / (b.0 - a.0);
            out.push(a.1 * (1.0 - w) + b.1 * w);
        }
    }
    out
}
