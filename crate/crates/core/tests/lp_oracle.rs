//! Small martingale transport LPs between atomic measures, used as an
//! optimality oracle for the left-curtain coupling.

mod common;

use cxshadow::coupling::{self, Cost};
use cxshadow::Measure;
use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Minimal `E h(Y − X)` over martingale couplings of atomic `μ ≤_cx ν`.
fn lp_min(mu: &Measure, nu: &Measure, cost: &Cost) -> f64 {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = mu
        .atoms()
        .iter()
        .map(|a| {
            nu.atoms()
                .iter()
                .map(|b| p.add_var(cost.eval(b.x - a.x), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for (i, a) in mu.atoms().iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        p.add_constraint(&row, ComparisonOp::Eq, a.w);
        let bary: Vec<_> = vars[i].iter().zip(nu.atoms()).map(|(&v, b)| (v, b.x - a.x)).collect();
        p.add_constraint(&bary, ComparisonOp::Eq, 0.0);
    }
    for (j, b) in nu.atoms().iter().enumerate() {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        p.add_constraint(&col, ComparisonOp::Eq, b.w);
    }
    p.solve().expect("martingale LP is feasible").objective()
}

#[test]
fn left_curtain_attains_the_cube_optimum() {
    let mut r = common::rng(7);
    for _ in 0..40 {
        let (mu, nu) = common::atomic_pair(&mut r);
        let c = coupling::left_curtain(&mu, &nu, 16).unwrap();
        let got = coupling::expected_cost(&c, &Cost::Cube);
        let best = lp_min(&mu, &nu, &Cost::Cube);
        assert!(got <= best + 1e-7 * (1.0 + best.abs()), "left-curtain {got} vs LP {best}");
    }
}

#[test]
fn square_cost_is_constant_over_the_lp() {
    let mut r = common::rng(11);
    for _ in 0..10 {
        let (mu, nu) = common::atomic_pair(&mut r);
        let c = coupling::sunset(&mu, &nu, 3).unwrap();
        let got = coupling::expected_cost(&c, &Cost::Square);
        let best = lp_min(&mu, &nu, &Cost::Square);
        assert!((got - best).abs() <= 1e-7 * (1.0 + best.abs()), "{got} vs {best}");
    }
}
