//! Finite positive measures on the real line made of weighted atoms and
//! uniform-density segments.
//!
//! Every [`Measure`] is kept in canonical form: atoms sorted with distinct
//! positions, segments sorted with pairwise-disjoint interiors, abutting
//! segments of equal density merged and no zero-weight entries. All
//! operations return new values.

use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::EPS_STRUCT;

/// A point mass `w · δ_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// Mass `w` spread uniformly over `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub w: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn density(&self) -> f64 {
        self.w / (self.b - self.a)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Mass-ordered view of a measure: atoms and uniform pieces that never
/// overlap, sorted by position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chunk {
    Atom { x: f64, w: f64 },
    Uniform { a: f64, b: f64, w: f64 },
}

impl Chunk {
    pub fn mass(&self) -> f64 {
        match *self {
            Chunk::Atom { w, .. } | Chunk::Uniform { w, .. } => w,
        }
    }

    pub fn first_moment(&self) -> f64 {
        match *self {
            Chunk::Atom { x, w } => x * w,
            Chunk::Uniform { a, b, w } => 0.5 * (a + b) * w,
        }
    }

    fn start(&self) -> f64 {
        match *self {
            Chunk::Atom { x, .. } => x,
            Chunk::Uniform { a, .. } => a,
        }
    }

    fn end(&self) -> f64 {
        match *self {
            Chunk::Atom { x, .. } => x,
            Chunk::Uniform { b, .. } => b,
        }
    }

    /// The part of this chunk lying between mass levels `lo` and `hi`
    /// (measured from the chunk's left end).
    fn slice(&self, lo: f64, hi: f64) -> Option<Chunk> {
        let w = self.mass();
        let lo = lo.clamp(0.0, w);
        let hi = hi.clamp(0.0, w);
        if hi - lo <= 0.0 {
            return None;
        }
        Some(match *self {
            Chunk::Atom { x, .. } => Chunk::Atom { x, w: hi - lo },
            Chunk::Uniform { a, b, .. } => {
                let at = |m: f64| {
                    if m >= w {
                        b
                    } else {
                        a + (b - a) * (m / w)
                    }
                };
                Chunk::Uniform {
                    a: at(lo),
                    b: at(hi),
                    w: hi - lo,
                }
            }
        })
    }
}

/// Finite positive measure on ℝ: weighted atoms plus uniform segments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    segments: Vec<Segment>,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        Measure::new(r.atoms, r.segments)
    }
}

impl From<Measure> for MeasureRepr {
    fn from(m: Measure) -> Self {
        MeasureRepr {
            atoms: m.atoms,
            segments: m.segments,
        }
    }
}

/// Builds a canonical measure from `(position, weight)` atoms and
/// `(left, right, weight)` segments.
pub fn make_measure(atoms: &[(f64, f64)], segments: &[(f64, f64, f64)]) -> Result<Measure> {
    Measure::new(
        atoms.iter().map(|&(x, w)| Atom { x, w }).collect(),
        segments.iter().map(|&(a, b, w)| Segment { a, b, w }).collect(),
    )
}

fn positions_coincide(x: f64, y: f64) -> bool {
    (x - y).abs() <= EPS_STRUCT * x.abs().max(y.abs()).max(1.0)
}

fn densities_agree(d1: f64, d2: f64) -> bool {
    (d1 - d2).abs() <= EPS_STRUCT * d1.abs().max(d2.abs()).max(1.0)
}

/// Sorts atoms, merges coincident positions and drops dust.
fn normalize_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|p, q| p.x.total_cmp(&q.x));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for at in atoms {
        match out.last_mut() {
            Some(last) if positions_coincide(last.x, at.x) => last.w += at.w,
            _ => out.push(at),
        }
    }
    out.retain(|at| at.w.abs() > EPS_STRUCT);
    out
}

/// Sums signed densities over the elementary intervals cut by every
/// endpoint. Returned pieces carry possibly negative density.
fn sweep_densities(signed: impl IntoIterator<Item = (Segment, f64)>) -> Vec<(f64, f64, f64)> {
    // (position, density change, active-count change)
    let mut events: Vec<(f64, f64, i64)> = Vec::new();
    for (s, sign) in signed {
        let d = sign * s.density();
        events.push((s.a, d, 1));
        events.push((s.b, -d, -1));
    }
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut out = Vec::new();
    let mut density = 0.0;
    let mut active = 0i64;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && positions_coincide(events[i].0, x) {
            density += events[i].1;
            active += events[i].2;
            i += 1;
        }
        if active == 0 {
            density = 0.0;
        }
        if i < events.len() && active > 0 {
            out.push((x, events[i].0, density));
        }
    }
    out
}

/// Merges abutting pieces of equal density and drops dust.
fn collect_segments(pieces: Vec<(f64, f64, f64)>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for (a, b, d) in pieces {
        let w = d * (b - a);
        if d.abs() <= EPS_STRUCT || w.abs() <= EPS_STRUCT || b <= a {
            continue;
        }
        if let Some(last) = out.last_mut() {
            if positions_coincide(last.b, a) && densities_agree(last.density(), d) {
                last.b = b;
                last.w += w;
                continue;
            }
        }
        out.push(Segment { a, b, w });
    }
    out
}

/// `(atoms, segments)` as `(x, w)` and `(a, b, w)` triples, the inputs of
/// [`make_measure`].
pub type Parts = (Vec<(f64, f64)>, Vec<(f64, f64, f64)>);

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

impl Measure {
    /// Validating constructor; see [`make_measure`].
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Measure> {
        for at in &atoms {
            check_finite(at.x)?;
            check_finite(at.w)?;
            if at.w <= 0.0 {
                return Err(Error::InvalidWeight(at.w));
            }
        }
        for s in &segments {
            check_finite(s.a)?;
            check_finite(s.b)?;
            check_finite(s.w)?;
            if s.w <= 0.0 {
                return Err(Error::InvalidWeight(s.w));
            }
            if s.a >= s.b {
                return Err(Error::InvalidSegment(s.a, s.b));
            }
        }
        Ok(Self::from_parts_unchecked(atoms, segments))
    }

    /// Canonicalizes already-validated parts; segments may overlap.
    pub(crate) fn from_parts_unchecked(atoms: Vec<Atom>, segments: Vec<Segment>) -> Measure {
        let atoms = normalize_atoms(atoms);
        let segments = collect_segments(sweep_densities(segments.into_iter().map(|s| (s, 1.0))));
        Measure { atoms, segments }
    }

    pub fn zero() -> Measure {
        Measure::default()
    }

    /// `w · δ_x`; zero measure when `w == 0`.
    pub fn dirac(x: f64, w: f64) -> Measure {
        Self::from_parts_unchecked(vec![Atom { x, w }], Vec::new())
    }

    /// Mass `w` spread uniformly on `[a, b]`.
    pub fn uniform(a: f64, b: f64, w: f64) -> Result<Measure> {
        Measure::new(Vec::new(), vec![Segment { a, b, w }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Decomposes into constructor inputs; `make_measure` of the result
    /// reproduces `self`.
    pub fn decompose(&self) -> Parts {
        (
            self.atoms.iter().map(|a| (a.x, a.w)).collect(),
            self.segments.iter().map(|s| (s.a, s.b, s.w)).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.segments.is_empty()
    }

    /// Total mass η(ℝ).
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum::<f64>() + self.segments.iter().map(|s| s.w).sum::<f64>()
    }

    /// First moment ∫x η(dx); 0 for the zero measure.
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.x * a.w).sum::<f64>()
            + self.segments.iter().map(|s| s.center() * s.w).sum::<f64>()
    }

    /// Barycentre `mean / mass`, `None` for the zero measure.
    pub fn barycentre(&self) -> Option<f64> {
        let m = self.mass();
        if self.is_zero() || m <= 0.0 {
            None
        } else {
            Some(self.mean() / m)
        }
    }

    /// ∫|x| η(dx).
    pub fn abs_moment(&self) -> f64 {
        let seg = |s: &Segment| {
            if s.a >= 0.0 || s.b <= 0.0 {
                s.center().abs() * s.w
            } else {
                0.5 * s.density() * (s.a * s.a + s.b * s.b)
            }
        };
        self.atoms.iter().map(|a| a.x.abs() * a.w).sum::<f64>() + self.segments.iter().map(seg).sum::<f64>()
    }

    /// Endpoints (ℓ, r) of the smallest closed interval containing the support.
    pub fn support(&self) -> Option<(f64, f64)> {
        let lo = self
            .atoms
            .first()
            .map(|a| a.x)
            .into_iter()
            .chain(self.segments.first().map(|s| s.a))
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .atoms
            .last()
            .map(|a| a.x)
            .into_iter()
            .chain(self.segments.last().map(|s| s.b))
            .fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi.is_finite() {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Every atom position and segment endpoint, sorted and distinct.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| a.x)
            .chain(self.segments.iter().flat_map(|s| [s.a, s.b]))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Mass-ordered decomposition (atoms interleaved with segment pieces).
    pub fn chunks(&self) -> Vec<Chunk> {
        let mut out = Vec::with_capacity(self.atoms.len() + 2 * self.segments.len());
        let mut ai = 0;
        for s in &self.segments {
            while ai < self.atoms.len() && self.atoms[ai].x <= s.a {
                out.push(Chunk::Atom {
                    x: self.atoms[ai].x,
                    w: self.atoms[ai].w,
                });
                ai += 1;
            }
            let d = s.density();
            let mut left = s.a;
            while ai < self.atoms.len() && self.atoms[ai].x < s.b {
                let x = self.atoms[ai].x;
                out.push(Chunk::Uniform {
                    a: left,
                    b: x,
                    w: d * (x - left),
                });
                out.push(Chunk::Atom {
                    x,
                    w: self.atoms[ai].w,
                });
                left = x;
                ai += 1;
            }
            let w_rest = if left == s.a { s.w } else { d * (s.b - left) };
            out.push(Chunk::Uniform { a: left, b: s.b, w: w_rest });
        }
        for at in &self.atoms[ai..] {
            out.push(Chunk::Atom { x: at.x, w: at.w });
        }
        out.retain(|c| c.mass() > 0.0);
        out
    }

    fn from_chunks(chunks: impl IntoIterator<Item = Chunk>) -> Measure {
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        for c in chunks {
            match c {
                Chunk::Atom { x, w } => atoms.push(Atom { x, w }),
                Chunk::Uniform { a, b, w } if b > a => segments.push(Segment { a, b, w }),
                Chunk::Uniform { a, w, .. } => atoms.push(Atom { x: a, w }),
            }
        }
        Self::from_parts_unchecked(atoms, segments)
    }

    /// η((−∞, k]).
    pub fn cdf(&self, k: f64) -> f64 {
        let mut total = 0.0;
        for at in &self.atoms {
            if at.x <= k {
                total += at.w;
            }
        }
        for s in &self.segments {
            if s.b <= k {
                total += s.w;
            } else if s.a < k {
                total += s.density() * (k - s.a);
            }
        }
        total
    }

    /// Restriction to the closed interval `[a, b]` (infinite bounds allowed).
    pub fn restrict(&self, a: f64, b: f64) -> Result<Measure> {
        if a.is_nan() || b.is_nan() {
            return Err(Error::NonFinite);
        }
        if a > b {
            return Err(Error::EmptyInterval(a, b));
        }
        Ok(self.restrict_bounds(Bound::Included(a), Bound::Included(b)))
    }

    /// Restriction to an interval with arbitrary open/closed endpoints.
    /// Endpoint inclusion only matters for atoms.
    pub fn restrict_bounds(&self, lo: Bound<f64>, hi: Bound<f64>) -> Measure {
        let above = |x: f64| match lo {
            Bound::Included(a) => x >= a,
            Bound::Excluded(a) => x > a,
            Bound::Unbounded => true,
        };
        let below = |x: f64| match hi {
            Bound::Included(b) => x <= b,
            Bound::Excluded(b) => x < b,
            Bound::Unbounded => true,
        };
        let lo_x = match lo {
            Bound::Included(a) | Bound::Excluded(a) => a,
            Bound::Unbounded => f64::NEG_INFINITY,
        };
        let hi_x = match hi {
            Bound::Included(b) | Bound::Excluded(b) => b,
            Bound::Unbounded => f64::INFINITY,
        };
        let atoms = self.atoms.iter().copied().filter(|at| above(at.x) && below(at.x)).collect();
        let mut segments = Vec::new();
        for s in &self.segments {
            let a = s.a.max(lo_x);
            let b = s.b.min(hi_x);
            if b > a {
                let w = if a == s.a && b == s.b { s.w } else { s.density() * (b - a) };
                segments.push(Segment { a, b, w });
            }
        }
        Self::from_parts_unchecked(atoms, segments)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Measure) -> Measure {
        let atoms = self.atoms.iter().chain(other.atoms.iter()).copied().collect();
        let segments = self.segments.iter().chain(other.segments.iter()).copied().collect();
        Self::from_parts_unchecked(atoms, segments)
    }

    /// `self − other`; fails with `NotDominated` unless `other ≤ self`
    /// setwise up to the structural tolerance.
    pub fn subtract(&self, other: &Measure) -> Result<Measure> {
        // rounding noise of the shadow pipeline, e.g. dust atoms on segment ends
        let tol = 1e3 * EPS_STRUCT * self.mass().max(1.0);
        // atoms: match by position
        let mut atoms: Vec<Atom> = self.atoms.clone();
        for at in &other.atoms {
            match atoms.iter_mut().find(|a| positions_coincide(a.x, at.x)) {
                Some(a) => a.w -= at.w,
                None => {
                    if at.w > tol {
                        return Err(Error::NotDominated(at.x));
                    }
                }
            }
        }
        for a in &atoms {
            if a.w < -tol {
                return Err(Error::NotDominated(a.x));
            }
        }
        atoms.retain(|a| a.w > tol);
        let pieces = sweep_densities(
            self.segments
                .iter()
                .map(|&s| (s, 1.0))
                .chain(other.segments.iter().map(|&s| (s, -1.0))),
        );
        for &(a, b, d) in &pieces {
            if d < -EPS_STRUCT * d.abs().max(1.0) && -d * (b - a) > tol {
                return Err(Error::NotDominated(0.5 * (a + b)));
            }
        }
        let pieces = pieces.into_iter().filter(|p| p.2 > 0.0).collect();
        Ok(Measure {
            atoms: normalize_atoms(atoms),
            segments: collect_segments(pieces),
        })
    }

    /// `u · self` for `u ≥ 0`.
    pub fn scale(&self, u: f64) -> Measure {
        if u <= 0.0 || !u.is_finite() {
            return Measure::zero();
        }
        let atoms = self.atoms.iter().map(|a| Atom { x: a.x, w: a.w * u }).collect();
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { a: s.a, b: s.b, w: s.w * u })
            .collect();
        Self::from_parts_unchecked(atoms, segments)
    }

    /// Left-continuous quantile `inf { k : η((−∞,k]) ≥ ζ }`. Level 0 maps
    /// to the left end of the support.
    pub fn quantile(&self, zeta: f64) -> Result<f64> {
        let mass = self.mass();
        if zeta.is_nan() || mass <= 0.0 || zeta < 0.0 || zeta > mass * (1.0 + EPS_STRUCT) + EPS_STRUCT {
            return Err(Error::OutOfRange { level: zeta, mass });
        }
        let chunks = self.chunks();
        if zeta <= 0.0 {
            return Ok(chunks[0].start());
        }
        let mut cum = 0.0;
        for c in &chunks {
            let w = c.mass();
            if cum + w >= zeta {
                return Ok(match *c {
                    Chunk::Atom { x, .. } => x,
                    Chunk::Uniform { a, b, .. } => (a + (b - a) * ((zeta - cum) / w)).min(b),
                });
            }
            cum += w;
        }
        Ok(chunks.last().map(|c| c.end()).unwrap_or(0.0))
    }

    /// The part of the measure between quantile levels `lo ≤ hi`, i.e. the
    /// mass that sits at levels in `[lo, hi]` of the cumulative ordering.
    pub fn quantile_slice(&self, lo: f64, hi: f64) -> Measure {
        let mut out = Vec::new();
        let mut cum = 0.0;
        for c in self.chunks() {
            let w = c.mass();
            if let Some(piece) = c.slice(lo - cum, hi - cum) {
                out.push(piece);
            }
            cum += w;
            if cum >= hi {
                break;
            }
        }
        Self::from_chunks(out)
    }

    /// Replaces each quantile cell of mass `mass/n` by an atom at its
    /// barycentre. The result has the same mass and first moment and is
    /// below `self` in convex order.
    pub fn discretize(&self, n: usize) -> Measure {
        let n = n.max(1);
        let mass = self.mass();
        if self.is_zero() || mass <= 0.0 {
            return Measure::zero();
        }
        let chunks = self.chunks();
        let cell = mass / n as f64;
        let mut atoms = Vec::with_capacity(n);
        let mut idx = 0; // current chunk
        let mut used = 0.0; // mass already consumed from chunks[idx]
        for i in 0..n {
            let mut need = if i + 1 == n { f64::INFINITY } else { cell };
            let mut w_sum = 0.0;
            let mut m_sum = 0.0;
            while need > 0.0 && idx < chunks.len() {
                let c = chunks[idx];
                let avail = c.mass() - used;
                let take = avail.min(need);
                if let Some(piece) = c.slice(used, used + take) {
                    w_sum += piece.mass();
                    m_sum += piece.first_moment();
                }
                need -= take;
                if take >= avail {
                    idx += 1;
                    used = 0.0;
                } else {
                    used += take;
                }
            }
            if w_sum > 0.0 {
                atoms.push(Atom { x: m_sum / w_sum, w: w_sum });
            }
        }
        Self::from_parts_unchecked(atoms, Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu_hat() -> Measure {
        make_measure(&[], &[(-1.0, -0.5, 0.5), (0.5, 1.0, 0.5)]).unwrap()
    }

    #[test]
    fn two_point_measure_is_centred() {
        let m = make_measure(&[(-1.0, 0.5), (1.0, 0.5)], &[]).unwrap();
        assert_eq!(m.mass(), 1.0);
        assert_eq!(m.mean(), 0.0);
    }

    #[test]
    fn empty_input_is_zero_measure() {
        let m = make_measure(&[], &[]).unwrap();
        assert!(m.is_zero());
        assert_eq!(m.mass(), 0.0);
        assert_eq!(m.mean(), 0.0);
        assert_eq!(m.barycentre(), None);
    }

    #[test]
    fn uniform_on_symmetric_interval() {
        let m = make_measure(&[], &[(-2.0, 2.0, 1.0)]).unwrap();
        assert_eq!(m.mass(), 1.0);
        assert_eq!(m.mean(), 0.0);
    }

    #[test]
    fn three_atoms_moments() {
        let t = 1.0 / 3.0;
        let m = make_measure(&[(-2.0, t), (0.0, t), (2.0, t)], &[]).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-15);
        assert_eq!(m.mean(), 0.0);
    }

    #[test]
    fn half_weight_uniform_moments() {
        let m = make_measure(&[], &[(0.5, 1.0, 0.5)]).unwrap();
        assert_eq!(m.mass(), 0.5);
        assert!((m.mean() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(make_measure(&[(0.0, 0.0)], &[]), Err(Error::InvalidWeight(0.0)));
        assert_eq!(make_measure(&[(0.0, -1.0)], &[]), Err(Error::InvalidWeight(-1.0)));
        assert_eq!(make_measure(&[], &[(1.0, 1.0, 1.0)]), Err(Error::InvalidSegment(1.0, 1.0)));
        assert_eq!(make_measure(&[(f64::NAN, 1.0)], &[]), Err(Error::NonFinite));
        assert_eq!(make_measure(&[], &[(0.0, f64::INFINITY, 1.0)]), Err(Error::NonFinite));
    }

    #[test]
    fn canonical_form_merges() {
        let m = make_measure(&[(1.0, 0.25), (1.0, 0.25)], &[(0.0, 1.0, 1.0), (1.0, 2.0, 1.0)]).unwrap();
        assert_eq!(m.atoms(), &[Atom { x: 1.0, w: 0.5 }]);
        assert_eq!(m.segments(), &[Segment { a: 0.0, b: 2.0, w: 2.0 }]);
        // overlapping input segments are summed
        let o = make_measure(&[], &[(0.0, 2.0, 2.0), (1.0, 2.0, 1.0)]).unwrap();
        assert_eq!(o.segments().len(), 2);
        assert!((o.segments()[1].density() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn restrict_example_slice() {
        let m = mu_hat().restrict(-1.0, 0.6).unwrap();
        assert!((m.mass() - 0.6).abs() < 1e-15);
        let segs = m.segments();
        assert_eq!(segs.len(), 2);
        assert_eq!((segs[0].a, segs[0].b), (-1.0, -0.5));
        assert!((segs[0].w - 0.5).abs() < 1e-15);
        assert_eq!((segs[1].a, segs[1].b), (0.5, 0.6));
        assert!((segs[1].w - 0.1).abs() < 1e-15);
    }

    #[test]
    fn restrict_identity_and_endpoint_atom() {
        let m = mu_hat().add(&Measure::dirac(0.0, 0.2));
        assert_eq!(m.restrict(f64::NEG_INFINITY, f64::INFINITY).unwrap(), m);
        let d = Measure::dirac(0.0, 1.0);
        assert_eq!(d.restrict(0.0, 0.0).unwrap(), d);
        assert_eq!(d.restrict(1.0, 0.0), Err(Error::EmptyInterval(1.0, 0.0)));
    }

    #[test]
    fn add_halves_gives_mu_hat() {
        let l = Measure::uniform(-1.0, -0.5, 0.5).unwrap();
        let r = Measure::uniform(0.5, 1.0, 0.5).unwrap();
        assert_eq!(l.add(&r), mu_hat());
    }

    #[test]
    fn subtract_leaves_middle_atom() {
        let t = 1.0 / 3.0;
        let nu = make_measure(&[(-2.0, t), (0.0, t), (2.0, t)], &[]).unwrap();
        let tt = make_measure(&[(-2.0, t), (2.0, t)], &[]).unwrap();
        let rest = nu.subtract(&tt).unwrap();
        assert_eq!(rest, Measure::dirac(0.0, t));
        assert!(matches!(tt.subtract(&nu), Err(Error::NotDominated(_))));
        let u = Measure::uniform(-2.0, 2.0, 1.0).unwrap();
        assert!(matches!(u.subtract(&Measure::dirac(0.0, 0.1)), Err(Error::NotDominated(_))));
        assert!(matches!(
            u.subtract(&Measure::uniform(0.0, 1.0, 0.5).unwrap()),
            Err(Error::NotDominated(_))
        ));
    }

    #[test]
    fn scale_by_zero() {
        assert!(mu_hat().scale(0.0).is_zero());
    }

    #[test]
    fn quantiles() {
        let u = Measure::uniform(-2.0, 2.0, 1.0).unwrap();
        assert_eq!(u.quantile(0.5).unwrap(), 0.0);
        assert_eq!(u.quantile(0.25).unwrap(), -1.0);
        let t = 1.0 / 3.0;
        let m = make_measure(&[(-2.0, t), (0.0, t), (2.0, t)], &[]).unwrap();
        assert_eq!(m.quantile(t).unwrap(), -2.0);
        assert_eq!(m.quantile(0.5).unwrap(), 0.0);
        assert!(matches!(m.quantile(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(Measure::zero().quantile(0.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn quantile_with_atom_inside_segment() {
        let m = make_measure(&[(0.0, 1.0)], &[(-1.0, 1.0, 2.0)]).unwrap();
        // mass 1 below 0, atom 1 at 0, mass 1 above
        assert_eq!(m.quantile(1.0).unwrap(), 0.0);
        assert_eq!(m.quantile(1.5).unwrap(), 0.0);
        assert_eq!(m.quantile(2.0).unwrap(), 0.0);
        assert!((m.quantile(2.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn discretize_examples() {
        assert_eq!(Measure::dirac(0.0, 1.0).discretize(5), Measure::dirac(0.0, 1.0));
        let u = Measure::uniform(-2.0, 2.0, 1.0).unwrap();
        let d = u.discretize(2);
        assert_eq!(d, make_measure(&[(-1.0, 0.5), (1.0, 0.5)], &[]).unwrap());
    }

    #[test]
    fn quantile_slice_lower_mass() {
        let u = Measure::uniform(-2.0, 2.0, 1.0).unwrap();
        let low = u.quantile_slice(0.0, 0.25);
        assert_eq!(low, Measure::uniform(-2.0, -1.0, 0.25).unwrap());
    }
}
