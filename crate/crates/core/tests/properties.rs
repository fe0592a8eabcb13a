mod common;

use cxshadow::coupling::{self, Cost};
use cxshadow::orders::{leq_convex, leq_setwise};
use cxshadow::shadow::{potential_gap, shadow};
use cxshadow::{call_potential, convex_hull, make_measure, measure_from_potential, put_potential, Measure};
use proptest::prelude::*;

fn lattice(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo * 8..=hi * 8).prop_map(|i| i as f64 / 8.0)
}

fn measure() -> impl Strategy<Value = Measure> {
    let atoms = prop::collection::vec((lattice(-20, 20), 0.05f64..2.0), 0..4);
    let segs = prop::collection::vec((lattice(-20, 19), 1u32..40, 0.05f64..2.0), 0..4);
    (atoms, segs)
        .prop_filter("non-zero", |(a, s)| !a.is_empty() || !s.is_empty())
        .prop_map(|(atoms, segs)| {
            let segs: Vec<(f64, f64, f64)> = segs.into_iter().map(|(a, len, w)| (a, a + len as f64 / 8.0, w)).collect();
            make_measure(&atoms, &segs).unwrap()
        })
}

fn grid(m: &Measure) -> Vec<f64> {
    let (lo, hi) = m.support().unwrap_or((-1.0, 1.0));
    (0..=64).map(|i| lo - 1.0 + (hi - lo + 2.0) * i as f64 / 64.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn put_call_parity(m in measure()) {
        let (p, c) = (put_potential(&m), call_potential(&m));
        for k in grid(&m) {
            let want = p.eval(k) + m.mean() - m.mass() * k;
            prop_assert!((c.eval(k) - want).abs() <= 1e-10 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn potential_round_trip(m in measure()) {
        let back = measure_from_potential(&put_potential(&m)).unwrap();
        prop_assert!(potential_gap(&back, &m) < 1e-11);
        prop_assert!((back.mass() - m.mass()).abs() < 1e-11);
    }

    #[test]
    fn put_potential_is_nondecreasing_convex(m in measure()) {
        let p = put_potential(&m);
        prop_assert!(p.is_convex(1e-12));
        let g = grid(&m);
        for w in g.windows(2) {
            prop_assert!(p.eval(w[1]) >= p.eval(w[0]) - 1e-12);
        }
    }

    #[test]
    fn add_then_subtract(a in measure(), b in measure()) {
        let back = a.add(&b).subtract(&b).unwrap();
        prop_assert!(potential_gap(&back, &a) < 1e-10);
    }

    #[test]
    fn quantile_inverts_cdf(m in measure(), u in 0.01f64..0.99) {
        let z = u * m.mass();
        let q = m.quantile(z).unwrap();
        prop_assert!(m.cdf(q) >= z - 1e-12);
        prop_assert!(m.cdf(q - 1e-9) <= z + 1e-12);
    }

    #[test]
    fn hull_is_a_convex_minorant(seed in any::<u64>()) {
        let (mu, nu) = common::pair(&mut common::rng(seed), false);
        let f = put_potential(&nu).sub(&put_potential(&mu));
        let h = convex_hull(&f).unwrap();
        prop_assert!(h.is_convex(1e-10));
        for &k in f.breakpoints() {
            prop_assert!(h.eval(k) <= f.eval(k) + 1e-10);
        }
        prop_assert!(convex_hull(&h).unwrap().sub(&h).sup_abs() < 1e-10);
    }

    #[test]
    fn shadow_is_feasible(seed in any::<u64>()) {
        let (mu, nu) = common::pair(&mut common::rng(seed), false);
        let s = shadow(&mu, &nu).unwrap();
        prop_assert!(leq_setwise(&s, &nu).holds);
        prop_assert!(leq_convex(&mu, &s).holds);
    }

    #[test]
    fn full_shadow_is_the_target(seed in any::<u64>()) {
        let (mu, nu) = common::pair(&mut common::rng(seed), true);
        let s = shadow(&mu, &nu).unwrap();
        prop_assert!(potential_gap(&s, &nu) < 1e-9);
    }

    #[test]
    fn left_curtain_prefixes_are_shadows(seed in any::<u64>()) {
        let (mu, nu) = common::atomic_pair(&mut common::rng(seed));
        let c = coupling::left_curtain(&mu, &nu, 16).unwrap();
        prop_assert!(c.rows.len() <= mu.atoms().len());
        let mut acc = Measure::zero();
        for (i, row) in c.rows.iter().enumerate() {
            acc = acc.add(&row.target);
            let prefix = make_measure(
                &mu.atoms()[..=i].iter().map(|a| (a.x, a.w)).collect::<Vec<_>>(),
                &[],
            ).unwrap();
            prop_assert!(potential_gap(&acc, &shadow(&prefix, &nu).unwrap()) < 1e-9);
        }
        prop_assert!(potential_gap(&c.total_target(), &nu) < 1e-9);
    }

    #[test]
    fn square_cost_is_scheme_free(seed in any::<u64>()) {
        let (mu, nu) = common::atomic_pair(&mut common::rng(seed));
        let costs: Vec<f64> = [
            coupling::left_curtain(&mu, &nu, 16).unwrap(),
            coupling::sunset(&mu, &nu, 3).unwrap(),
            coupling::middle_curtain(&mu, &nu, 3).unwrap(),
        ]
        .iter()
        .map(|c| {
            prop_assert!(coupling::verify_coupling(c, &mu, &nu, coupling::TOL_MART).holds);
            Ok(coupling::expected_cost(c, &Cost::Square))
        })
        .collect::<Result<_, TestCaseError>>()?;
        prop_assert!((costs[0] - costs[1]).abs() < 1e-9);
        prop_assert!((costs[0] - costs[2]).abs() < 1e-9);
    }
}
