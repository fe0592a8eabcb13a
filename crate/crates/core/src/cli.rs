//! Command-line front end. Measures and couplings are read from JSON
//! files; results go to stdout as JSON or CSV `k,value[,curve]`.
//!
//! Exit codes: 0 success, 1 relation false, 2 input error, 3 numeric
//! failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::coupling::{self, Coupling, Cost};
use crate::envelope::convex_hull_detailed;
use crate::error::Error;
use crate::measure::Measure;
use crate::orders::{leq_convex_with, leq_extended_with, leq_setwise_with, OrderReport};
use crate::piecewise::PiecewisePoly;
use crate::potential::{call_potential, classify_with, put_potential, u_potential, PotentialClass};
use crate::shadow::{self, counter_shadow_majorant, QUANTILE_TOL};
use crate::tol::Tolerance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cxshadow", version, about = "Shadows, convex envelopes and shadow couplings of measures on the line")]
struct Cli {
    /// Override the order and structural tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Pair {
    mu: PathBuf,
    nu: PathBuf,
}

#[derive(Args, Debug, Default)]
struct Sampling {
    /// Sample grid `a:b:step`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Print samples as CSV instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Potential function of a measure.
    Potential {
        #[arg(long, value_enum, default_value = "put")]
        kind: Kind,
        #[command(flatten)]
        sampling: Sampling,
        measure: PathBuf,
    },
    /// Convex hull of P_ν − P_μ with its contact set.
    Hull {
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        pair: Pair,
    },
    /// Decide an order relation between two measures.
    Order {
        #[arg(long, value_enum)]
        relation: Relation,
        a: PathBuf,
        b: PathBuf,
    },
    /// Shadow of μ in ν.
    Shadow {
        /// Write P_ν − P_μ and its hull as CSV.
        #[arg(long)]
        emit_potentials: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        pair: Pair,
    },
    /// Counter-shadow of μ in ν.
    Countershadow {
        #[arg(long, value_enum, default_value = "hull")]
        method: Method,
        /// Write the counter-shadow majorant and its hull as CSV.
        #[arg(long)]
        emit_potentials: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        pair: Pair,
    },
    /// Shadow coupling of μ and ν.
    Couple {
        /// `left-curtain`, `sunset:<n>` or `middle:<n>`.
        #[arg(long)]
        scheme: String,
        /// Cells used for continuous sources.
        #[arg(long, default_value_t = coupling::DEFAULT_CELLS)]
        discretize: usize,
        #[command(flatten)]
        pair: Pair,
    },
    /// Check a coupling against its marginals.
    Verify { coupling: PathBuf, mu: PathBuf, nu: PathBuf },
    /// Expected cost h(y − x) of a coupling.
    Cost {
        /// `abs`, `square`, `cube`, `quartic` or `exp:<λ>`.
        #[arg(long = "h")]
        h: String,
        coupling: PathBuf,
    },
    /// Sample potential curves as CSV.
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Comma-separated from: pmu, pnu, diff, hull, shadow, tilde, tilde-hull.
        #[arg(long, default_value = "diff,hull")]
        curves: String,
        #[command(flatten)]
        pair: Pair,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Put,
    Call,
    U,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Relation {
    Cx,
    E,
    Setwise,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Hull,
    Quantile,
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidWeight(_)
            | Error::InvalidSegment(..)
            | Error::NonFinite
            | Error::EmptyInterval(..)
            | Error::OutOfRange { .. }
            | Error::OutOfChord { .. }
            | Error::NotPotential(_)
            | Error::NotExtendedOrder(_)
            | Error::NotConvexOrder(_)
            | Error::PreconditionFailed(_)
            | Error::UnsupportedCost(_) => EXIT_INPUT,
            Error::NotDominated(_)
            | Error::NotConvex(_)
            | Error::UnboundedBelow { .. }
            | Error::HullFailure(_)
            | Error::NoConvergence(_) => EXIT_NUMERIC,
        };
        Failure { code, msg: e.to_string() }
    }
}

type Outcome = std::result::Result<(String, i32), Failure>;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_INPUT;
            }
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_measure(path: &Path) -> std::result::Result<Measure, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_coupling(path: &Path) -> std::result::Result<Coupling, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}

/// Grid `a:b:step`, endpoints included.
pub fn parse_grid(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, h] = parts[..] else {
        return Err(format!("grid `{spec}` is not of the form a:b:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("grid `{spec}`: {e}"));
    let (a, b, h) = (num(a)?, num(b)?, num(h)?);
    if !(a.is_finite() && b.is_finite() && h.is_finite()) || !(h > 0.0) || b < a {
        return Err(format!("grid `{spec}` needs finite a ≤ b and step > 0"));
    }
    let n = ((b - a) / h * (1.0 + 1e-12)).floor();
    if n > 1e7 {
        return Err(format!("grid `{spec}` has too many points"));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| if i == n && (a + i as f64 * h - b).abs() < 1e-9 * h { b } else { a + i as f64 * h }).collect())
}

fn grid_or_default(spec: Option<&str>, measures: &[&Measure]) -> std::result::Result<Vec<f64>, Failure> {
    if let Some(s) = spec {
        return parse_grid(s).map_err(Failure::input);
    }
    let (lo, hi) = measures
        .iter()
        .filter_map(|m| m.support())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| (l.min(a), h.max(b)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (-1.0, 1.0) };
    let pad = 0.1 * (hi - lo).max(1.0);
    let step = (hi - lo + 2.0 * pad) / 1000.0;
    Ok((0..=1000).map(|i| lo - pad + i as f64 * step).collect())
}

fn csv(grid: &[f64], curves: &[(&str, &PiecewisePoly)]) -> String {
    let mut out = String::from("k,value,curve\n");
    for (name, f) in curves {
        for &k in grid {
            let _ = writeln!(out, "{k},{},{name}", f.eval(k));
        }
    }
    out
}

fn csv_single(grid: &[f64], f: &PiecewisePoly) -> String {
    let mut out = String::from("k,value\n");
    for &k in grid {
        let _ = writeln!(out, "{k},{}", f.eval(k));
    }
    out
}

fn report_outcome(r: &OrderReport) -> (String, i32) {
    (json(r), if r.holds { EXIT_OK } else { EXIT_FALSE })
}

#[derive(Serialize)]
struct PotentialOut<'a> {
    function: &'a PiecewisePoly,
    class: Option<PotentialClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct HullOut<'a> {
    function: &'a PiecewisePoly,
    class: Option<PotentialClass>,
    gaps: &'a [(f64, f64)],
    contact: &'a [(f64, f64)],
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 2]>>,
}

fn samples(grid: Option<Vec<f64>>, f: &PiecewisePoly) -> Option<Vec<[f64; 2]>> {
    grid.map(|g| g.iter().map(|&k| [k, f.eval(k)]).collect())
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> Outcome {
    let tol = cli.tol.map(Tolerance::uniform).unwrap_or_default();
    if !(tol.order >= 0.0 && tol.order.is_finite()) {
        return Err(Failure::input("--tol must be a finite nonnegative number"));
    }
    match cli.cmd {
        Cmd::Potential { kind, sampling, measure } => {
            let m = read_measure(&measure)?;
            let f = match kind {
                Kind::Put => put_potential(&m),
                Kind::Call => call_potential(&m),
                Kind::U => u_potential(&m),
            };
            let grid = sampling.grid.as_deref().map(parse_grid).transpose().map_err(Failure::input)?;
            if sampling.csv {
                let g = grid.map_or_else(|| grid_or_default(None, &[&m]), Ok)?;
                return Ok((csv_single(&g, &f), EXIT_OK));
            }
            let class = classify_with(&f, &tol).ok();
            Ok((json(&PotentialOut { function: &f, class, samples: samples(grid, &f) }), EXIT_OK))
        }
        Cmd::Hull { sampling, pair } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let f = put_potential(&nu).sub(&put_potential(&mu));
            let h = convex_hull_detailed(&f)?;
            let grid = sampling.grid.as_deref().map(parse_grid).transpose().map_err(Failure::input)?;
            if sampling.csv {
                let g = grid.map_or_else(|| grid_or_default(None, &[&mu, &nu]), Ok)?;
                return Ok((csv(&g, &[("diff", &f), ("hull", &h.function)]), EXIT_OK));
            }
            let out = HullOut {
                function: &h.function,
                class: classify_with(&h.function, &tol).ok(),
                gaps: &h.gaps,
                contact: &h.contact,
                samples: samples(grid, &h.function),
            };
            Ok((json(&out), EXIT_OK))
        }
        Cmd::Order { relation, a, b } => {
            let (a, b) = (read_measure(&a)?, read_measure(&b)?);
            let r = match relation {
                Relation::Cx => leq_convex_with(&a, &b, &tol),
                Relation::E => leq_extended_with(&a, &b, &tol),
                Relation::Setwise => leq_setwise_with(&a, &b, &tol),
            };
            Ok(report_outcome(&r))
        }
        Cmd::Shadow { emit_potentials, grid, pair } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let s = shadow::shadow_with(&mu, &nu, &tol)?;
            if let Some(path) = emit_potentials {
                let f = put_potential(&nu).sub(&put_potential(&mu));
                let h = crate::envelope::convex_hull(&f)?;
                let g = grid_or_default(grid.as_deref(), &[&mu, &nu])?;
                write_file(&path, &csv(&g, &[("diff", &f), ("hull", &h)]))?;
            }
            Ok((json(&s), EXIT_OK))
        }
        Cmd::Countershadow { method, emit_potentials, grid, pair } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let t = match method {
                Method::Hull => shadow::counter_shadow_with(&mu, &nu, &tol)?,
                Method::Quantile => shadow::counter_shadow_quantile_with(&mu, &nu, QUANTILE_TOL, &tol)?,
            };
            if let Some(path) = emit_potentials {
                let f = counter_shadow_majorant(&mu, &nu);
                let h = crate::envelope::convex_hull(&f)?;
                let g = grid_or_default(grid.as_deref(), &[&mu, &nu])?;
                write_file(&path, &csv(&g, &[("tilde", &f), ("tilde-hull", &h)]))?;
            }
            Ok((json(&t), EXIT_OK))
        }
        Cmd::Couple { scheme, discretize, pair } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            if discretize == 0 {
                return Err(Failure::input("--discretize must be at least 1"));
            }
            let slices = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| Failure::input(format!("bad slice count in scheme `{scheme}`")))
            };
            let c = if scheme == "left-curtain" {
                coupling::left_curtain(&mu, &nu, discretize)?
            } else if let Some(n) = scheme.strip_prefix("sunset:") {
                coupling::sunset_with(&mu, &nu, slices(n)?, discretize)?
            } else if let Some(n) = scheme.strip_prefix("middle:") {
                coupling::middle_curtain_with(&mu, &nu, slices(n)?, discretize)?
            } else {
                return Err(Failure::input(format!(
                    "unknown scheme `{scheme}`; expected left-curtain, sunset:<n> or middle:<n>"
                )));
            };
            Ok((json(&c), EXIT_OK))
        }
        Cmd::Verify { coupling: path, mu, nu } => {
            let c = read_coupling(&path)?;
            let (mu, nu) = (read_measure(&mu)?, read_measure(&nu)?);
            let t = cli.tol.unwrap_or(coupling::TOL_MART);
            Ok(report_outcome(&coupling::verify_coupling(&c, &mu, &nu, t)))
        }
        Cmd::Cost { h, coupling: path } => {
            let cost: Cost = h.parse()?;
            let c = read_coupling(&path)?;
            #[derive(Serialize)]
            struct CostOut {
                cost: f64,
            }
            Ok((json(&CostOut { cost: coupling::expected_cost(&c, &cost) }), EXIT_OK))
        }
        Cmd::Sample { grid, curves, pair } => {
            let (mu, nu) = (read_measure(&pair.mu)?, read_measure(&pair.nu)?);
            let g = parse_grid(&grid).map_err(Failure::input)?;
            let p_mu = put_potential(&mu);
            let p_nu = put_potential(&nu);
            let diff = p_nu.sub(&p_mu);
            let mut out: Vec<(String, PiecewisePoly)> = Vec::new();
            for name in curves.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let f = match name {
                    "pmu" => p_mu.clone(),
                    "pnu" => p_nu.clone(),
                    "diff" => diff.clone(),
                    "hull" => crate::envelope::convex_hull(&diff)?,
                    "shadow" => put_potential(&shadow::shadow_with(&mu, &nu, &tol)?),
                    "tilde" => counter_shadow_majorant(&mu, &nu),
                    "tilde-hull" => crate::envelope::convex_hull(&counter_shadow_majorant(&mu, &nu))?,
                    other => return Err(Failure::input(format!("unknown curve `{other}`"))),
                };
                out.push((name.to_string(), f));
            }
            let refs: Vec<(&str, &PiecewisePoly)> = out.iter().map(|(n, f)| (n.as_str(), f)).collect();
            Ok((csv(&g, &refs), EXIT_OK))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-1:1:0.5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g = parse_grid("-2:2:0.01").unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::InvalidWeight(0.0)).code, EXIT_INPUT);
        assert_eq!(Failure::from(Error::NoConvergence(1.0)).code, EXIT_NUMERIC);
        assert_eq!(run(["cxshadow", "bogus"]), EXIT_INPUT);
    }
}
