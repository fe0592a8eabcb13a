//! Random measure pairs with `μ ≤_E ν`.
//!
//! ν is a sum of atoms and uniform pieces on a 1/8 lattice in [−50, 50].
//! χ scales each piece of ν by a factor in [0, 1], so χ ≤ ν. μ collapses
//! random runs of χ's pieces to their barycentres, so μ ≤_cx χ.

#![allow(dead_code)]

use cxshadow::measure::Chunk;
use cxshadow::Measure;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lattice(r: &mut Rng8, lo: f64, hi: f64) -> f64 {
    let (a, b) = ((lo * 8.0).ceil() as i64, (hi * 8.0).floor() as i64);
    r.gen_range(a..=b) as f64 / 8.0
}

/// Random ν: up to four atoms and four segments of width ≥ 1 and density
/// ≤ 1, total mass ≤ 10.
pub fn target(r: &mut Rng8) -> Measure {
    loop {
        let n_atoms = r.gen_range(0..=4);
        let n_segs = r.gen_range(0..=4);
        if n_atoms + n_segs == 0 {
            continue;
        }
        let atoms: Vec<(f64, f64)> = (0..n_atoms)
            .map(|_| (lattice(r, -50.0, 50.0), r.gen_range(0.1..2.0)))
            .collect();
        let segs: Vec<(f64, f64, f64)> = (0..n_segs)
            .map(|_| {
                let a = lattice(r, -50.0, 49.0);
                let b = lattice(r, a + 1.0, (a + 20.0).min(50.0));
                (a, b, r.gen_range(0.1..1.0) * (b - a).min(2.0))
            })
            .collect();
        let m = cxshadow::make_measure(&atoms, &segs).unwrap();
        return if m.mass() > 10.0 { m.scale(10.0 / m.mass()) } else { m };
    }
}

fn chunk_measure(c: &Chunk) -> Measure {
    match *c {
        Chunk::Atom { x, w } => Measure::dirac(x, w),
        Chunk::Uniform { a, b, w } => Measure::uniform(a, b, w).unwrap(),
    }
}

/// χ ≤ ν by scaling pieces; `full` keeps χ = ν.
pub fn thin(r: &mut Rng8, nu: &Measure, full: bool) -> Measure {
    if full {
        return nu.clone();
    }
    let mut out = Measure::zero();
    for c in nu.chunks() {
        let f: f64 = match r.gen_range(0..10) {
            0 => 0.0,
            1 | 2 => 1.0,
            _ => r.gen_range(0.0..1.0),
        };
        out = out.add(&chunk_measure(&c).scale(f));
    }
    if out.is_zero() {
        nu.scale(0.5)
    } else {
        out
    }
}

/// μ ≤_cx χ by collapsing random runs of pieces (and random left parts of
/// segments) to barycentre atoms.
pub fn collapse(r: &mut Rng8, chi: &Measure) -> Measure {
    let mut pieces: Vec<Measure> = Vec::new();
    for c in chi.chunks() {
        match c {
            Chunk::Uniform { a, b, w } if r.gen_bool(0.3) => {
                let s = a + (b - a) * r.gen_range(0.2..0.8);
                pieces.push(Measure::uniform(a, s, w * (s - a) / (b - a)).unwrap());
                pieces.push(Measure::uniform(s, b, w * (b - s) / (b - a)).unwrap());
            }
            _ => pieces.push(chunk_measure(&c)),
        }
    }
    let mut out = Measure::zero();
    let mut i = 0;
    while i < pieces.len() {
        if r.gen_bool(0.4) {
            out = out.add(&pieces[i]);
            i += 1;
            continue;
        }
        let mut group = pieces[i].clone();
        i += 1;
        while i < pieces.len() && r.gen_bool(0.5) {
            group = group.add(&pieces[i]);
            i += 1;
        }
        if let Some(b) = group.barycentre() {
            out = out.add(&Measure::dirac(b, group.mass()));
        }
    }
    out
}

/// `(μ, ν)` with `μ ≤_E ν`; equal masses when `full`.
pub fn pair(r: &mut Rng8, full: bool) -> (Measure, Measure) {
    let nu = target(r);
    let chi = thin(r, &nu, full);
    (collapse(r, &chi), nu)
}

/// Random split `μ = μ₁ + μ₂` with `μ₁ ≤ μ`.
pub fn split(r: &mut Rng8, mu: &Measure) -> (Measure, Measure) {
    let mut first = Measure::zero();
    let mut second = Measure::zero();
    for c in mu.chunks() {
        let m = chunk_measure(&c);
        let f = match r.gen_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => r.gen_range(0.0..1.0),
        };
        first = first.add(&m.scale(f));
        second = second.add(&m.scale(1.0 - f));
    }
    (first, second)
}

/// Random small atomic pair with `μ ≤_cx ν`.
pub fn atomic_pair(r: &mut Rng8) -> (Measure, Measure) {
    let n = r.gen_range(1..=6);
    let atoms: Vec<(f64, f64)> = (0..n)
        .map(|_| (lattice(r, -10.0, 10.0), r.gen_range(0.1..1.0)))
        .collect();
    let nu = cxshadow::make_measure(&atoms, &[]).unwrap();
    let mu = collapse(r, &nu);
    (mu, nu)
}
