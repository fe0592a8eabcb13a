//! Martingale couplings obtained by shadowing the pieces of an ordered
//! decomposition of the source measure one after the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::orders::{leq_convex_with, leq_setwise_with, OrderReport};
use crate::shadow::{shadow, shadow_with};
use crate::tol::{Tolerance, EPS_STRUCT, TOL_ORDER};

/// Cells used when a continuous source has to be discretized.
pub const DEFAULT_CELLS: usize = 256;

/// Martingale tolerance used when none is given.
pub const TOL_MART: f64 = 1e-9;

/// Source mass `m` at `x` sent to `target`; `target` has mass `m`, so the
/// kernel is `target / m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingRow {
    pub x: f64,
    pub m: f64,
    pub target: Measure,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub rows: Vec<CouplingRow>,
}

impl Coupling {
    /// First marginal, with coincident source points merged.
    pub fn source_marginal(&self) -> Measure {
        self.rows
            .iter()
            .fold(Measure::zero(), |acc, r| acc.add(&Measure::dirac(r.x, r.m)))
    }

    /// Second marginal.
    pub fn total_target(&self) -> Measure {
        self.rows.iter().fold(Measure::zero(), |acc, r| acc.add(&r.target))
    }

    /// Probability kernel of row `i`.
    pub fn kernel(&self, i: usize) -> Measure {
        let r = &self.rows[i];
        r.target.scale(1.0 / r.m)
    }
}

/// Shadows the atoms of each part in turn, ascending within a part, into
/// what is left of `nu`.
pub fn shadow_coupling(parts: &[Measure], nu: &Measure) -> Result<Coupling> {
    if let Some(p) = parts.iter().find(|p| !p.is_atomic()) {
        return Err(Error::PreconditionFailed(format!(
            "parts must be atomic; found one with {} segments",
            p.segments().len()
        )));
    }
    // Rounding drifts over many steps, so feasibility is checked relative
    // to the size of the potentials and a final atom takes whatever is left.
    let reach = nu.support().map_or(0.0, |(a, b)| a.abs().max(b.abs()));
    let tol = Tolerance {
        order: TOL_ORDER * (1.0 + nu.mass() * (1.0 + reach)),
        ..Tolerance::default()
    };
    let mass_tol = 1e3 * EPS_STRUCT * nu.mass().max(1.0);
    let mut rest = nu.clone();
    let mut rows = Vec::new();
    for part in parts {
        for at in part.atoms() {
            let target = if (rest.mass() - at.w).abs() <= mass_tol {
                std::mem::take(&mut rest)
            } else {
                let t = shadow_with(&Measure::dirac(at.x, at.w), &rest, &tol)?;
                rest = rest.subtract(&t)?;
                t
            };
            rows.push(CouplingRow {
                x: at.x,
                m: at.w,
                target,
            });
        }
    }
    Ok(Coupling { rows })
}

fn require_convex(mu: &Measure, nu: &Measure) -> Result<()> {
    let r = leq_convex_with(mu, nu, &Tolerance::default());
    if r.holds {
        Ok(())
    } else {
        Err(Error::NotConvexOrder(r.detail))
    }
}

fn atomic(m: &Measure, cells: usize) -> Measure {
    if m.is_atomic() {
        m.clone()
    } else {
        m.discretize(cells.max(1))
    }
}

/// Left-curtain coupling: the source is swept from left to right.
/// Continuous sources are first reduced to `n` barycentre atoms.
pub fn left_curtain(mu: &Measure, nu: &Measure, n: usize) -> Result<Coupling> {
    require_convex(mu, nu)?;
    shadow_coupling(&[atomic(mu, n)], nu)
}

/// Sunset coupling with `n` equal vertical slices `μ/n`.
pub fn sunset(mu: &Measure, nu: &Measure, n: usize) -> Result<Coupling> {
    sunset_with(mu, nu, n, DEFAULT_CELLS)
}

pub fn sunset_with(mu: &Measure, nu: &Measure, n: usize, cells: usize) -> Result<Coupling> {
    require_convex(mu, nu)?;
    let n = n.max(1);
    let slice = atomic(mu, cells).scale(1.0 / n as f64);
    shadow_coupling(&vec![slice; n], nu)
}

/// Middle-curtain coupling with `n` slices of `u ↦ S^μ(u·μ(ℝ)·δ_b)`, `b`
/// the barycentre of μ. A continuous μ is discretized first, so the
/// slices are atomic.
pub fn middle_curtain(mu: &Measure, nu: &Measure, n: usize) -> Result<Coupling> {
    middle_curtain_with(mu, nu, n, DEFAULT_CELLS)
}

pub fn middle_curtain_with(mu: &Measure, nu: &Measure, n: usize, cells: usize) -> Result<Coupling> {
    require_convex(mu, nu)?;
    shadow_coupling(&middle_slices(&atomic(mu, cells), n)?, nu)
}

/// Increments `S^μ(u_i·m·δ_b) − S^μ(u_{i−1}·m·δ_b)` for `u_i = i/n`.
pub fn middle_slices(mu: &Measure, n: usize) -> Result<Vec<Measure>> {
    let n = n.max(1);
    let Some(b) = mu.barycentre() else {
        return Ok(Vec::new());
    };
    let m = mu.mass();
    let mut prev = Measure::zero();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let cur = if i == n {
            mu.clone()
        } else {
            shadow(&Measure::dirac(b, m * i as f64 / n as f64), mu)?
        };
        out.push(cur.subtract(&prev)?);
        prev = cur;
    }
    Ok(out)
}

/// Checks the source marginal against μ (equality for atomic μ, convex
/// domination with equal mass and mean otherwise), `Σ targets ≤ ν`, and
/// the barycentre of every row.
pub fn verify_coupling(c: &Coupling, mu: &Measure, nu: &Measure, tol: f64) -> OrderReport {
    let tols = Tolerance {
        structural: tol.max(EPS_STRUCT),
        order: tol,
    };
    for r in &c.rows {
        let dm = r.target.mass() - r.m;
        let db = r.target.mean() - r.m * r.x;
        if !(r.m > 0.0) || dm.abs() > tol * (1.0 + r.m) {
            return OrderReport::fail(-dm.abs(), Some(r.x), format!("row at {}: target mass off by {dm}", r.x));
        }
        if db.abs() > tol * (1.0 + r.x.abs() * r.m) {
            return OrderReport::fail(-db.abs(), Some(r.x), format!("row at {}: barycentre off by {}", r.x, db / r.m));
        }
    }
    let source = c.source_marginal();
    if mu.is_atomic() {
        let gap = crate::shadow::potential_gap(&source, mu);
        if !(gap <= tol * (1.0 + mu.mass())) {
            return OrderReport::fail(-gap, None, format!("source marginal differs from μ by {gap:e}"));
        }
    } else {
        let r = leq_convex_with(&source, mu, &tols);
        if !r.holds {
            return OrderReport::fail(r.margin, r.witness, format!("source marginal not ≤_cx μ: {}", r.detail));
        }
    }
    let r = leq_setwise_with(&c.total_target(), nu, &tols);
    if !r.holds {
        return OrderReport::fail(r.margin, r.witness, format!("targets exceed ν: {}", r.detail));
    }
    OrderReport::pass(r.margin, format!("{} rows verified", c.rows.len()))
}

/// Cost `h(y − x)` of a move from `x` to `y`.
pub enum Cost {
    Abs,
    Square,
    Cube,
    Quartic,
    /// `h(d) = e^{λd}`.
    Exp(f64),
    Custom(Box<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Cost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cost::Abs => write!(f, "abs"),
            Cost::Square => write!(f, "square"),
            Cost::Cube => write!(f, "cube"),
            Cost::Quartic => write!(f, "quartic"),
            Cost::Exp(l) => write!(f, "exp:{l}"),
            Cost::Custom(_) => write!(f, "custom"),
        }
    }
}

impl std::str::FromStr for Cost {
    type Err = Error;

    /// `abs`, `square`, `cube`, `quartic` or `exp:<λ>`.
    fn from_str(s: &str) -> Result<Cost> {
        match s {
            "abs" => Ok(Cost::Abs),
            "square" => Ok(Cost::Square),
            "cube" => Ok(Cost::Cube),
            "quartic" => Ok(Cost::Quartic),
            _ => match s.strip_prefix("exp:").map(str::parse::<f64>) {
                Some(Ok(l)) if l.is_finite() => Ok(Cost::Exp(l)),
                _ => Err(Error::UnsupportedCost(s.to_string())),
            },
        }
    }
}

impl Cost {
    pub fn eval(&self, d: f64) -> f64 {
        match self {
            Cost::Abs => d.abs(),
            Cost::Square => d * d,
            Cost::Cube => d * d * d,
            Cost::Quartic => (d * d) * (d * d),
            Cost::Exp(l) => (l * d).exp(),
            Cost::Custom(h) => h(d),
        }
    }

    fn antiderivative(&self, t: f64) -> Option<f64> {
        Some(match self {
            Cost::Abs => 0.5 * t * t.abs(),
            Cost::Square => t * t * t / 3.0,
            Cost::Cube => (t * t) * (t * t) / 4.0,
            Cost::Quartic => (t * t) * (t * t) * t / 5.0,
            Cost::Exp(l) if *l == 0.0 => t,
            Cost::Exp(l) => (l * t).exp() / l,
            Cost::Custom(_) => return None,
        })
    }

    /// `∫_lo^hi h(t) dt`.
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        if let (Some(a), Some(b)) = (self.antiderivative(lo), self.antiderivative(hi)) {
            return b - a;
        }
        // costs of a displacement are typically kinked at zero
        if lo < 0.0 && hi > 0.0 {
            gauss_legendre(|t| self.eval(t), lo, 0.0) + gauss_legendre(|t| self.eval(t), 0.0, hi)
        } else {
            gauss_legendre(|t| self.eval(t), lo, hi)
        }
    }
}

/// Composite 5-point Gauss–Legendre rule on 32 panels.
fn gauss_legendre(h: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    const PANELS: usize = 32;
    let w = (hi - lo) / PANELS as f64;
    let mut sum = 0.0;
    for p in 0..PANELS {
        let mid = lo + (p as f64 + 0.5) * w;
        for (z, wt) in NODES {
            sum += wt * h(mid + 0.5 * w * z);
        }
    }
    0.5 * w * sum
}

/// `Σ_rows ∫ h(y − x) target(dy)`.
pub fn expected_cost(c: &Coupling, cost: &Cost) -> f64 {
    c.rows
        .iter()
        .map(|r| {
            let atoms: f64 = r.target.atoms().iter().map(|a| a.w * cost.eval(a.x - r.x)).sum();
            let segs: f64 = r
                .target
                .segments()
                .iter()
                .map(|s| s.density() * cost.integral(s.a - r.x, s.b - r.x))
                .sum();
            atoms + segs
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::make_measure;
    use crate::shadow::potential_gap;

    const T: f64 = 1.0 / 3.0;

    fn nu3() -> Measure {
        make_measure(&[(-2.0, T), (0.0, T), (2.0, T)], &[]).unwrap()
    }

    fn two() -> Measure {
        make_measure(&[(-1.0, 0.5), (1.0, 0.5)], &[]).unwrap()
    }

    #[test]
    fn single_atom_part() {
        let mu = Measure::dirac(0.0, 0.5);
        let c = shadow_coupling(std::slice::from_ref(&mu), &nu3()).unwrap();
        assert_eq!(c.rows.len(), 1);
        assert!(potential_gap(&c.rows[0].target, &shadow(&mu, &nu3()).unwrap()) < 1e-14);
    }

    #[test]
    fn atoms_into_three_points() {
        let parts = [Measure::dirac(-1.0, 0.5), Measure::dirac(1.0, 0.5)];
        let c = shadow_coupling(&parts, &nu3()).unwrap();
        assert!(potential_gap(&c.total_target(), &nu3()) < 1e-14);
        assert!(verify_coupling(&c, &two(), &nu3(), TOL_MART).holds);
        let lc = left_curtain(&two(), &nu3(), 8).unwrap();
        let first = shadow(&Measure::dirac(-1.0, 0.5), &nu3()).unwrap();
        assert!(potential_gap(&lc.rows[0].target, &first) < 1e-14);
    }

    #[test]
    fn identity_when_source_equals_target() {
        let c = left_curtain(&nu3(), &nu3(), 8).unwrap();
        for r in &c.rows {
            assert!(potential_gap(&r.target, &Measure::dirac(r.x, r.m)) < 1e-14);
        }
        assert!(expected_cost(&c, &Cost::Abs).abs() < 1e-14);
    }

    #[test]
    fn rejects_continuous_parts_and_unordered_pairs() {
        let u = Measure::uniform(-1.0, 1.0, 1.0).unwrap();
        assert!(matches!(shadow_coupling(std::slice::from_ref(&u), &u), Err(Error::PreconditionFailed(_))));
        assert!(matches!(left_curtain(&nu3(), &two(), 4), Err(Error::NotConvexOrder(_))));
    }

    #[test]
    fn perturbed_row_fails_verification() {
        let mut c = left_curtain(&two(), &nu3(), 8).unwrap();
        assert!(verify_coupling(&c, &two(), &nu3(), TOL_MART).holds);
        let shifted: Vec<(f64, f64)> = c.rows[0].target.atoms().iter().map(|a| (a.x + 0.1, a.w)).collect();
        c.rows[0].target = make_measure(&shifted, &[]).unwrap();
        let r = verify_coupling(&c, &two(), &nu3(), TOL_MART);
        assert!(!r.holds);
        assert_eq!(r.witness, Some(-1.0));
    }

    #[test]
    fn square_cost_is_scheme_independent() {
        let mu = two();
        let nu = nu3();
        let expect = 8.0 / 3.0 - 1.0;
        for c in [
            left_curtain(&mu, &nu, 8).unwrap(),
            sunset(&mu, &nu, 4).unwrap(),
            middle_curtain(&mu, &nu, 4).unwrap(),
        ] {
            assert!(verify_coupling(&c, &mu, &nu, TOL_MART).holds);
            assert!((expected_cost(&c, &Cost::Square) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let mu = Measure::uniform(-1.0, 1.0, 1.0).unwrap();
        let nu = Measure::uniform(-2.0, 2.0, 1.0).unwrap();
        let c = left_curtain(&mu, &nu, 16).unwrap();
        for (cost, h) in [
            (Cost::Abs, Box::new(|d: f64| d.abs()) as Box<dyn Fn(f64) -> f64 + Send + Sync>),
            (Cost::Cube, Box::new(|d: f64| d * d * d)),
            (Cost::Exp(0.7), Box::new(|d: f64| (0.7 * d).exp())),
        ] {
            let exact = expected_cost(&c, &cost);
            let quad = expected_cost(&c, &Cost::Custom(h));
            assert!((exact - quad).abs() < 1e-6, "{cost:?}: {exact} vs {quad}");
        }
    }

    #[test]
    fn cost_names() {
        assert!(matches!("exp:-1.5".parse::<Cost>(), Ok(Cost::Exp(l)) if l == -1.5));
        assert!(matches!("square".parse::<Cost>(), Ok(Cost::Square)));
        assert!(matches!("log".parse::<Cost>(), Err(Error::UnsupportedCost(_))));
    }

    #[test]
    fn json_shape() {
        let c = left_curtain(&two(), &nu3(), 8).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with("{\"rows\":[{\"x\":-1.0,\"m\":0.5,\"target\":{"));
        let back: Coupling = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
