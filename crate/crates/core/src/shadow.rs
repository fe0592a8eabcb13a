//! Shadow and counter-shadow of a measure inside a larger one, and the
//! structural identities relating them.

use std::ops::Bound;

use crate::envelope::convex_hull;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::orders::{leq_convex_with, leq_extended_with, leq_setwise_with, OrderReport};
use crate::potential::{call_potential, measure_from_potential, put_potential};
use crate::tol::{Tolerance, EPS_STRUCT};

/// Default tolerance on the mean gap in the quantile construction.
pub const QUANTILE_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

/// `sup_k |P_a(k) − P_b(k)|`.
pub fn potential_gap(a: &Measure, b: &Measure) -> f64 {
    put_potential(a).sub(&put_potential(b)).sup_abs()
}

fn require_extended(mu: &Measure, nu: &Measure, tol: &Tolerance) -> Result<()> {
    let r = leq_extended_with(mu, nu, tol);
    if r.holds {
        Ok(())
    } else {
        Err(Error::NotExtendedOrder(r.margin))
    }
}

/// Snaps the mass of a constructed measure back onto `mass` when the two
/// differ by float noise only.
fn with_mass(m: Measure, mass: f64) -> Measure {
    let got = m.mass();
    if got > 0.0 && got != mass && (got - mass).abs() <= 1e3 * EPS_STRUCT * mass.max(1.0) {
        m.scale(mass / got)
    } else {
        m
    }
}

/// `S^ν(μ)`, the convex-order smallest `η` with `μ ≤_cx η ≤ ν`:
/// `P_S = P_ν − (P_ν − P_μ)^c`.
pub fn shadow(mu: &Measure, nu: &Measure) -> Result<Measure> {
    shadow_with(mu, nu, &Tolerance::default())
}

pub fn shadow_with(mu: &Measure, nu: &Measure, tol: &Tolerance) -> Result<Measure> {
    if mu.is_zero() {
        return Ok(Measure::zero());
    }
    require_extended(mu, nu, tol)?;
    let p_nu = put_potential(nu);
    let hull = convex_hull(&p_nu.sub(&put_potential(mu)))?;
    let s = measure_from_potential(&p_nu.sub(&hull))?;
    Ok(with_mass(s, mu.mass()))
}

/// `P̃ = min(P_ν, C_ν + μ(ℝ)k − μ̄)`, the function whose hull is the
/// counter-shadow potential.
pub fn counter_shadow_majorant(mu: &Measure, nu: &Measure) -> crate::piecewise::PiecewisePoly {
    let p_nu = put_potential(nu);
    let shifted = call_potential(nu).add_affine(mu.mass(), -mu.mean());
    p_nu.min(&shifted)
}

/// `T^ν(μ)`, the convex-order largest `η` with `μ ≤_cx η ≤ ν`, as the
/// measure of the hull of [`counter_shadow_majorant`].
pub fn counter_shadow(mu: &Measure, nu: &Measure) -> Result<Measure> {
    counter_shadow_with(mu, nu, &Tolerance::default())
}

pub fn counter_shadow_with(mu: &Measure, nu: &Measure, tol: &Tolerance) -> Result<Measure> {
    if mu.is_zero() {
        return Ok(Measure::zero());
    }
    require_extended(mu, nu, tol)?;
    let hull = convex_hull(&counter_shadow_majorant(mu, nu))?;
    let t = measure_from_potential(&hull)?;
    Ok(with_mass(t, mu.mass()))
}

/// `θ^ζ`: ν with the quantile band `(G(ζ), G(ζ + D))` removed and the
/// boundary atoms trimmed so the total mass is `μ(ℝ)`.
fn theta(nu: &Measure, mu_mass: f64, zeta: f64) -> Result<Measure> {
    let d = nu.mass() - mu_mass;
    let lo = nu.quantile(zeta)?;
    let hi = nu.quantile((zeta + d).min(nu.mass()))?;
    let left = nu.restrict_bounds(Bound::Unbounded, Bound::Excluded(lo));
    let right = nu.restrict_bounds(Bound::Excluded(hi), Bound::Unbounded);
    let alpha = (zeta - left.mass()).max(0.0);
    let beta = (mu_mass - zeta - right.mass()).max(0.0);
    Ok(left
        .add(&right)
        .add(&Measure::dirac(lo, alpha))
        .add(&Measure::dirac(hi, beta)))
}

/// Counter-shadow by the quantile construction: bisection on `ζ ∈
/// [0, μ(ℝ)]` for `mean(θ^ζ) = μ̄`. `tol` bounds the mean gap relative to
/// `1 + ∫|x| ν(dx)`.
pub fn counter_shadow_quantile(mu: &Measure, nu: &Measure, tol: f64) -> Result<Measure> {
    counter_shadow_quantile_with(mu, nu, tol, &Tolerance::default())
}

pub fn counter_shadow_quantile_with(mu: &Measure, nu: &Measure, tol: f64, order: &Tolerance) -> Result<Measure> {
    if mu.is_zero() {
        return Ok(Measure::zero());
    }
    require_extended(mu, nu, order)?;
    if nu.mass() - mu.mass() <= order.order {
        return Ok(nu.clone());
    }
    let m = mu.mass();
    let target = mu.mean();
    let scaled = tol * (1.0 + nu.abs_moment());
    let gap = |z: f64| -> Result<(f64, Measure)> {
        let th = theta(nu, m, z)?;
        Ok((th.mean() - target, th))
    };
    let (g0, t0) = gap(0.0)?;
    let (g1, t1) = gap(m)?;
    if g0.abs() <= scaled {
        return Ok(with_mass(t0, m));
    }
    if g1.abs() <= scaled {
        return Ok(with_mass(t1, m));
    }
    if g0 < 0.0 || g1 > 0.0 {
        return Err(Error::NoConvergence(if g0 < 0.0 { g0 } else { g1 }));
    }
    let (mut lo, mut hi) = (0.0, m);
    let mut best = (g1.abs(), t1);
    for _ in 0..MAX_BISECTIONS {
        let z = 0.5 * (lo + hi);
        let (g, th) = gap(z)?;
        if g.abs() < best.0 {
            best = (g.abs(), th);
        }
        if g.abs() <= scaled {
            break;
        }
        if g > 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        if !(lo < hi) {
            break;
        }
    }
    // the mean map is continuous, so a bracket shrunk to rounding width
    // means the remaining gap is rounding noise
    if best.0 > scaled && hi - lo > EPS_STRUCT * m {
        return Err(Error::NoConvergence(best.0));
    }
    Ok(with_mass(best.1, m))
}

/// `μ ≤_cx η ≤ ν`.
pub fn is_feasible(eta: &Measure, mu: &Measure, nu: &Measure) -> OrderReport {
    is_feasible_with(eta, mu, nu, &Tolerance::default())
}

pub fn is_feasible_with(eta: &Measure, mu: &Measure, nu: &Measure, tol: &Tolerance) -> OrderReport {
    let cx = leq_convex_with(mu, eta, tol);
    if !cx.holds {
        return OrderReport::fail(cx.margin, cx.witness, format!("μ ≤_cx η fails: {}", cx.detail));
    }
    let sw = leq_setwise_with(eta, nu, tol);
    if !sw.holds {
        return OrderReport::fail(sw.margin, sw.witness, format!("η ≤ ν fails: {}", sw.detail));
    }
    OrderReport::pass(cx.margin.min(sw.margin), "feasible")
}

fn gap_report(gap: f64, tol: f64, what: &str) -> OrderReport {
    if gap <= tol {
        OrderReport::pass(tol - gap, format!("{what}: potential gap {gap:e}"))
    } else {
        OrderReport::fail(tol - gap, None, format!("{what}: potential gap {gap:e}"))
    }
}

/// `S^ν(μ₁ + μ₂) = S^ν(μ₁) + S^{ν − S^ν(μ₁)}(μ₂)`, compared in potential
/// sup-norm.
pub fn check_associativity(mu1: &Measure, mu2: &Measure, nu: &Measure, tol: f64) -> Result<OrderReport> {
    let total = shadow(&mu1.add(mu2), nu)?;
    let s1 = shadow(mu1, nu)?;
    let rest = nu.subtract(&s1)?;
    let ext = leq_extended_with(mu2, &rest, &Tolerance::default());
    if !ext.holds {
        return Ok(OrderReport::fail(
            ext.margin,
            ext.witness,
            format!("μ₂ ≤_E ν − S^ν(μ₁) fails: {}", ext.detail),
        ));
    }
    let split = s1.add(&shadow(mu2, &rest)?);
    Ok(gap_report(potential_gap(&total, &split), tol, "associativity"))
}

/// `S^{S^ν(μ)}(ξ) = S^ν(ξ)` for `ξ ≤ μ ≤_E ν`.
pub fn check_shadow_of_shadow(xi: &Measure, mu: &Measure, nu: &Measure, tol: f64) -> Result<OrderReport> {
    let pre = leq_setwise_with(xi, mu, &Tolerance::default());
    if !pre.holds {
        return Err(Error::PreconditionFailed(format!("ξ ≤ μ fails: {}", pre.detail)));
    }
    check_shadow_of_shadow_unchecked(xi, mu, nu, tol)
}

/// [`check_shadow_of_shadow`] without the `ξ ≤ μ` requirement; the
/// identity may then fail.
pub fn check_shadow_of_shadow_unchecked(xi: &Measure, mu: &Measure, nu: &Measure, tol: f64) -> Result<OrderReport> {
    let inner = shadow(mu, nu)?;
    let lhs = shadow(xi, &inner)?;
    let rhs = shadow(xi, nu)?;
    Ok(gap_report(potential_gap(&lhs, &rhs), tol, "shadow of shadow"))
}
