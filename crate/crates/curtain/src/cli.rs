//! Batch front end: parse measure specs, build and certify triples, export
//! curves and laws, sample, price and run verification suites.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::american_put::{price_report, PutPair};
use crate::coupling::{joint_law, sample, transport_cost, JointLaw};
use crate::curtain::{build_left_curtain, CouplingTriple};
use crate::error::Error;
use crate::limits::{convergence_probe, envelope_report};
use crate::measures::{AtomicMeasure, MeasureSpec};
use crate::single_atom::build_upsilon;

/// Exit code for malformed inputs.
pub const EXIT_BAD_INPUT: i32 = 2;
/// Exit code for marginals that are not in convex order.
pub const EXIT_CONVEX_ORDER: i32 = 3;
/// Exit code for certification failures.
pub const EXIT_CERTIFICATION: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    Verify,
    Sample,
    Price,
    Probe,
    Upsilon,
}

/// Parsed invocation; command-specific fields are optional until checked.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub mu_path: PathBuf,
    pub nu_path: PathBuf,
    pub triple_path: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub n: usize,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub grid: usize,
}

/// A failed run: message plus process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn bad_input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::NotConvexOrder => EXIT_CONVEX_ORDER,
            Error::AtomEmbedding { .. } | Error::Uncertified(_) => EXIT_CERTIFICATION,
            _ => EXIT_BAD_INPUT,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::bad_input(err.to_string())
    }
}

/// Floats print with 17 significant digits so runs reproduce bit-exactly.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn load_spec(path: &Path) -> Result<MeasureSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))
}

fn load_measure(path: &Path) -> Result<AtomicMeasure, CliError> {
    Ok(load_spec(path)?.to_measure()?)
}

fn triple_csv(triple: &CouplingTriple) -> String {
    let mut out = String::from("u_lo,u_hi,R,G,S\n");
    for p in &triple.pieces {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(p.u_lo),
            fmt_float(p.u_hi),
            fmt_float(p.r),
            fmt_float(p.g),
            fmt_float(p.s)
        );
    }
    out
}

fn joint_csv(law: &JointLaw) -> String {
    let mut out = String::from("x,y,mass\n");
    for a in &law.atoms {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_float(a.x),
            fmt_float(a.y),
            fmt_float(a.mass)
        );
    }
    out
}

fn require_out(config: &RunConfig) -> Result<&PathBuf, CliError> {
    config
        .out
        .as_ref()
        .ok_or_else(|| CliError::bad_input("--out is required for this command"))
}

fn build_triple(config: &RunConfig) -> Result<CouplingTriple, CliError> {
    let mu = load_measure(&config.mu_path)?;
    let nu = load_measure(&config.nu_path)?;
    Ok(build_left_curtain(&mu, &nu)?)
}

/// Runs one command; on success files land at the configured paths and the
/// summary goes to stdout.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    match config.command {
        Command::Build => {
            let triple = build_triple(config)?;
            triple.require_certified()?;
            let out = require_out(config)?;
            fs::write(out.with_extension("csv"), triple_csv(&triple))?;
            fs::write(
                out.with_extension("json"),
                serde_json::to_string_pretty(&triple)
                    .map_err(|e| CliError::bad_input(e.to_string()))?,
            )?;
            fs::write(
                out.with_extension("joint.csv"),
                joint_csv(&joint_law(&triple)?),
            )?;
            println!("build: {} pieces certified", triple.pieces.len());
            Ok(())
        }
        Command::Verify => run_verify(config),
        Command::Sample => {
            let triple = build_triple(config)?;
            triple.require_certified()?;
            let out = require_out(config)?;
            let mut csv = String::from("x,y\n");
            for (x, y) in sample(&triple, config.seed, config.n) {
                let _ = writeln!(csv, "{},{}", fmt_float(x), fmt_float(y));
            }
            fs::write(out, csv)?;
            println!("sample: {} draws with seed {}", config.n, config.seed);
            Ok(())
        }
        Command::Price => {
            let (Some(k1), Some(k2)) = (config.k1, config.k2) else {
                return Err(CliError::bad_input("--k1 and --k2 are required"));
            };
            let k = PutPair::new(k1, k2)?;
            let triple = build_triple(config)?;
            triple.require_certified()?;
            let report = price_report(&triple, k)?;
            let out = require_out(config)?;
            fs::write(
                out,
                serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::bad_input(e.to_string()))?,
            )?;
            println!(
                "price: primal {} dual {} archetype {}",
                fmt_float(report.primal),
                fmt_float(report.dual),
                report.archetype
            );
            Ok(())
        }
        Command::Probe => {
            let spec = load_spec(&config.mu_path)?;
            let quantile = spec.quantile_fn().ok_or_else(|| {
                CliError::bad_input("probe requires a uniform or samples initial law")
            })?;
            let nu = load_measure(&config.nu_path)?;
            // Refinement levels: decades up to the configured n.
            let mut ns = vec![];
            let mut level = 10usize;
            while level < config.n {
                ns.push(level);
                level *= 10;
            }
            ns.push(config.n);
            let grid: Vec<f64> = (1..=config.grid)
                .map(|i| i as f64 / (config.grid + 1) as f64)
                .collect();
            let report = convergence_probe(&*quantile, &nu, &ns, &grid)?;
            let out = require_out(config)?;
            let mut csv = String::from("n,u,S_n,G_n,R_n,J_plus,j\n");
            for row in &report.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    row.n,
                    fmt_float(row.u),
                    fmt_float(row.s),
                    fmt_float(row.g),
                    fmt_float(row.r),
                    fmt_float(row.j_plus),
                    row.j_lower.map(fmt_float).unwrap_or_default()
                );
            }
            fs::write(out.with_extension("csv"), csv)?;
            fs::write(
                out.with_extension("json"),
                serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::bad_input(e.to_string()))?,
            )?;
            println!("probe: {} levels", report.entries.len());
            Ok(())
        }
        Command::Upsilon => {
            let nu = load_measure(&config.nu_path)?;
            let w = config
                .k1
                .ok_or_else(|| CliError::bad_input("--k1 carries the base point for upsilon"))?;
            let table = build_upsilon(&nu, w)?;
            let out = require_out(config)?;
            let mut csv = String::from("p,alpha,beta,a,b,upsilon\n");
            for row in table.rows() {
                let cells: Vec<String> = row.iter().copied().map(fmt_float).collect();
                let _ = writeln!(csv, "{}", cells.join(","));
            }
            fs::write(out, csv)?;
            println!("upsilon: {} breakpoints", table.p_breaks.len());
            Ok(())
        }
    }
}

fn run_verify(config: &RunConfig) -> Result<(), CliError> {
    let mu = load_measure(&config.mu_path)?;
    let nu = load_measure(&config.nu_path)?;
    let triple = match &config.triple_path {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let mut triple: CouplingTriple = serde_json::from_str(&text)
                .map_err(|e| CliError::bad_input(format!("{}: {e}", path.display())))?;
            if triple.mu.tv_distance(&mu) > 1e-9 || triple.nu.tv_distance(&nu) > 1e-9 {
                return Err(CliError::bad_input(
                    "stored triple does not match the given marginals",
                ));
            }
            triple.recertify();
            triple
        }
        None => build_left_curtain(&mu, &nu)?,
    };

    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{}: {}", name, if ok { "ok" } else { "FAIL" });
        if !ok {
            failures.push(format!("{name}: {detail}"));
        }
    };

    check(
        "certification",
        triple.is_certified(),
        triple.certification.violations.join("; "),
    );
    if triple.is_certified() {
        let law = joint_law(&triple)?;
        let tv = law.second_marginal().tv_distance(&nu);
        check("second marginal", tv <= 1e-9, format!("tv {tv}"));
        let cost = transport_cost(&triple)?;
        let defect = (law.mean_abs_displacement() - 2.0 * cost).abs();
        check("dispersion identity", defect <= 1e-10, format!("{defect}"));
        let grid: Vec<f64> = (1..config.grid.max(2))
            .map(|i| i as f64 / config.grid.max(2) as f64)
            .collect();
        let envelopes = envelope_report(&triple, &grid)?;
        check(
            "envelopes",
            envelopes.violations.is_empty(),
            envelopes.violations.join("; "),
        );
    }

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_CERTIFICATION,
            message: failures.join("\n"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_17_significant_digits() {
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
        let parsed: f64 = fmt_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }
}
