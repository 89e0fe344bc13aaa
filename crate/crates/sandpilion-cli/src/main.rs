//! Batch driver for the sandpilion library: spanning-tree counts, sandpile
//! groups, comb diagnostics, generating-function coefficients, graph export,
//! and whole-sweep verification with machine-readable reports.

use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use sandpilion::formulas::{gf_coefficients, predict_group, t_closed};
use sandpilion::graph::{
    build_bicoconut, build_coconut, build_left_comb, cone, FamilyParams, Multigraph,
};
use sandpilion::oracle::{brute_force_tau_with_budget, DEFAULT_EDGE_BUDGET};
use sandpilion::relations::{
    verify_cokernel_equivalence, verify_det_m_prime, verify_n_case, verify_trunk_relations,
};
use sandpilion::sandpile::{comb_claims, mu, sandpile_group, tau};
use sandpilion::Error;

const EXIT_VERIFY_FAILURE: i32 = 1;
const EXIT_BAD_INPUT: i32 = 2;
const EXIT_BUDGET: i32 = 3;

const CHECK_NAMES: [&str; 7] = [
    "tau",
    "group",
    "symmetry",
    "trunk",
    "detMprime",
    "cokernel",
    "N",
];

#[derive(Parser)]
#[command(
    name = "sandpilion",
    version,
    about = "Spanning-tree counts and sandpile groups of coned tree families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the spanning-tree count of the cone over a bi-coconut tree.
    Tau {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        s1: u32,
        #[arg(long)]
        s2: u32,
        #[arg(long, value_enum, default_value_t = TauMethod::Closed)]
        method: TauMethod,
    },
    /// Print the sandpile group of the cone over a bi-coconut tree as JSON.
    Group {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        s1: u32,
        #[arg(long)]
        s2: u32,
        #[arg(long, value_enum, default_value_t = GroupMethod::Predictor)]
        method: GroupMethod,
    },
    /// Print cyclicity diagnostics for the cone over a left comb as JSON.
    Comb {
        #[arg(long)]
        p: u32,
    },
    /// Run verification checks over a parameter sweep and emit a report.
    Verify {
        /// Inclusive path-length range, "lo..hi" or a single value.
        #[arg(long, value_parser = parse_range, default_value = "1..7")]
        p: (u32, u32),
        /// Inclusive left-leaf range.
        #[arg(long, value_parser = parse_range, default_value = "1..4")]
        s1: (u32, u32),
        /// Inclusive right-leaf range.
        #[arg(long, value_parser = parse_range, default_value = "1..4")]
        s2: (u32, u32),
        /// Comma-separated subset of: tau,group,symmetry,trunk,detMprime,cokernel,N.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        /// Report destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Jsonl)]
        format: ReportFormat,
        /// Suppress the timestamp field so repeated runs are byte-identical.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Print generating-function coefficients as a JSON array of decimal strings.
    Gf {
        #[arg(long)]
        s1: u32,
        #[arg(long)]
        s2: u32,
        #[arg(long)]
        terms: usize,
    },
    /// Write a family tree as DOT or JSON.
    Export {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        s1: Option<u32>,
        #[arg(long)]
        s2: Option<u32>,
        /// Leaf count for the coconut family.
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
        format: ExportFormat,
        /// Destination file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TauMethod {
    Closed,
    Determinant,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupMethod {
    Predictor,
    Snf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bicoconut,
    Coconut,
    Comb,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn bad_input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BAD_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError {
            code: exit_code_for(&err),
            message: err.to_string(),
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        _ => EXIT_BAD_INPUT,
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let parse_bound = |b: &str| {
        b.trim()
            .parse::<u32>()
            .map_err(|_| format!("invalid range bound {b:?}"))
    };
    if let Some((lo, hi)) = s.split_once("..") {
        Ok((parse_bound(lo)?, parse_bound(hi)?))
    } else {
        let v = parse_bound(s)?;
        Ok((v, v))
    }
}

fn enumeration_budget() -> Result<usize, CliError> {
    match std::env::var("SANDPILION_BUDGET") {
        Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
            CliError::bad_input(format!(
                "SANDPILION_BUDGET must be a nonnegative integer, got {raw:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_EDGE_BUDGET),
        Err(e) => Err(CliError::bad_input(format!("SANDPILION_BUDGET unreadable: {e}"))),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Tau { p, s1, s2, method } => cmd_tau(p, s1, s2, method),
        Command::Group { p, s1, s2, method } => cmd_group(p, s1, s2, method),
        Command::Comb { p } => cmd_comb(p),
        Command::Verify {
            p,
            s1,
            s2,
            checks,
            out,
            format,
            no_timestamp,
        } => cmd_verify(p, s1, s2, checks, out, format, no_timestamp),
        Command::Gf { s1, s2, terms } => cmd_gf(s1, s2, terms),
        Command::Export {
            family,
            p,
            s1,
            s2,
            s,
            format,
            out,
        } => cmd_export(family, p, s1, s2, s, format, out),
    }
}

fn bicoconut_cone(params: FamilyParams) -> Result<Multigraph, Error> {
    cone(&build_bicoconut(params)?)
}

fn cmd_tau(p: u32, s1: u32, s2: u32, method: TauMethod) -> Result<i32, CliError> {
    let params = FamilyParams::new(p, s1, s2);
    let value = match method {
        TauMethod::Closed => t_closed(params)?,
        TauMethod::Determinant => tau(&bicoconut_cone(params)?)?,
        TauMethod::Brute => {
            if p < 1 || s1 < 1 || s2 < 1 {
                return Err(CliError::bad_input(
                    "brute enumeration requires p >= 1, s1 >= 1, s2 >= 1",
                ));
            }
            brute_force_tau_with_budget(&bicoconut_cone(params)?, enumeration_budget()?)?
        }
    };
    println!("{value}");
    Ok(0)
}

fn cmd_group(p: u32, s1: u32, s2: u32, method: GroupMethod) -> Result<i32, CliError> {
    let params = FamilyParams::new(p, s1, s2);
    let rendered = match method {
        GroupMethod::Predictor => {
            let prediction = predict_group(params)?;
            let group = prediction.to_group()?;
            json!({
                "invariant_factors": group
                    .factors()
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<String>>(),
                "order": group.order().to_string(),
                "mu": group.mu(),
                "case": prediction.case_tag.as_str(),
            })
        }
        GroupMethod::Snf => sandpile_group(&bicoconut_cone(params)?)?.to_json(),
    };
    println!("{rendered}");
    Ok(0)
}

fn cmd_comb(p: u32) -> Result<i32, CliError> {
    let comb = build_left_comb(p)?;
    let c = cone(&comb)?;
    let generators = mu(&c)?;
    let (claim1_odd, claim2_minor) = comb_claims(p)?;
    let rendered = json!({
        "p": p,
        "mu": generators,
        "leaves": comb.leaves().len(),
        "claim1_odd": claim1_odd,
        "claim2_minor": claim2_minor.to_string(),
        "cyclic": generators <= 1,
    });
    println!("{rendered}");
    Ok(0)
}

fn cmd_gf(s1: u32, s2: u32, terms: usize) -> Result<i32, CliError> {
    let coeffs = gf_coefficients(s1, s2, terms)?;
    let rendered = Value::Array(
        coeffs
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    );
    println!("{rendered}");
    Ok(0)
}

fn cmd_export(
    family: Family,
    p: u32,
    s1: Option<u32>,
    s2: Option<u32>,
    s: Option<u32>,
    format: ExportFormat,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let graph = match family {
        Family::Bicoconut => {
            let s1 = s1.ok_or_else(|| CliError::bad_input("bicoconut export requires --s1"))?;
            let s2 = s2.ok_or_else(|| CliError::bad_input("bicoconut export requires --s2"))?;
            build_bicoconut(FamilyParams::new(p, s1, s2))?
        }
        Family::Coconut => {
            let s = s.ok_or_else(|| CliError::bad_input("coconut export requires --s"))?;
            build_coconut(p, s)?
        }
        Family::Comb => build_left_comb(p)?,
    };
    let rendered = match format {
        ExportFormat::Dot => graph.to_dot(),
        ExportFormat::Json => format!("{}\n", graph.to_json()),
    };
    match out {
        Some(path) => fs::write(&path, rendered)
            .map_err(|e| CliError::bad_input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }
    Ok(0)
}

/// One verification point: every selected check, in canonical order, with
/// `None` for checks that do not apply at these parameters.
struct PointReport {
    p: u32,
    s1: u32,
    s2: u32,
    results: Vec<(&'static str, Option<bool>)>,
}

impl PointReport {
    fn to_json(&self) -> Value {
        let mut checks = serde_json::Map::new();
        for (name, outcome) in &self.results {
            checks.insert((*name).into(), json!(outcome));
        }
        json!({"p": self.p, "s1": self.s1, "s2": self.s2, "checks": checks})
    }

    fn failed(&self) -> bool {
        self.results.iter().any(|(_, r)| *r == Some(false))
    }

    fn executed(&self) -> usize {
        self.results.iter().filter(|(_, r)| r.is_some()).count()
    }
}

fn outcome(result: Result<bool, Error>) -> Option<bool> {
    Some(result.unwrap_or(false))
}

fn evaluate_point(p: u32, s1: u32, s2: u32, selected: &[&'static str]) -> PointReport {
    let params = FamilyParams::new(p, s1, s2);
    let mut results = Vec::new();
    for &name in selected {
        let entry = match name {
            "tau" => outcome((|| Ok(t_closed(params)? == tau(&bicoconut_cone(params)?)?))()),
            "group" => outcome((|| {
                Ok(predict_group(params)?.to_group()?
                    == sandpile_group(&bicoconut_cone(params)?)?)
            })()),
            "symmetry" => outcome((|| {
                let swapped = FamilyParams::new(p, s2, s1);
                Ok(t_closed(params)? == t_closed(swapped)?
                    && sandpile_group(&bicoconut_cone(params)?)?
                        == sandpile_group(&bicoconut_cone(swapped)?)?)
            })()),
            "trunk" => (p >= 2).then(|| verify_trunk_relations(params).unwrap_or(false)),
            "detMprime" => (p >= 2).then(|| verify_det_m_prime(params).unwrap_or(false)),
            "cokernel" => (p >= 2).then(|| verify_cokernel_equivalence(params).unwrap_or(false)),
            "N" => (p >= 2 && p % 3 != 1 && s1 >= 2 && s2 >= 2)
                .then(|| verify_n_case(params).unwrap_or(false)),
            _ => unreachable!("check names validated before dispatch"),
        };
        results.push((name, entry));
    }
    PointReport { p, s1, s2, results }
}

fn csv_row(p: u32, s1: u32, s2: u32) -> (String, bool) {
    let params = FamilyParams::new(p, s1, s2);
    let closed = t_closed(params).map(|v| v.to_string()).unwrap_or_default();
    let det = tau(&bicoconut_cone(params).unwrap())
        .map(|v| v.to_string())
        .unwrap_or_default();
    let tau_match = !closed.is_empty() && closed == det;
    let predicted = predict_group(params)
        .and_then(|pr| pr.to_group())
        .map(|g| g.factor_string())
        .unwrap_or_default();
    let snf = sandpile_group(&bicoconut_cone(params).unwrap())
        .map(|g| g.factor_string())
        .unwrap_or_default();
    let group_match = !predicted.is_empty() && predicted == snf;
    let row = format!(
        "{p},{s1},{s2},{closed},{det},{tau_match},{predicted},{snf},{group_match}"
    );
    (row, tau_match && group_match)
}

fn select_checks(requested: &[String]) -> Result<Vec<&'static str>, CliError> {
    if requested.is_empty() {
        return Ok(CHECK_NAMES.to_vec());
    }
    let mut selected = Vec::new();
    for name in requested {
        match CHECK_NAMES.iter().find(|&&known| known == name) {
            Some(&known) => {
                if !selected.contains(&known) {
                    selected.push(known);
                }
            }
            None => {
                return Err(CliError::bad_input(format!(
                    "unknown check {name:?}; expected one of {}",
                    CHECK_NAMES.join(", ")
                )))
            }
        }
    }
    // Canonical order keeps reports deterministic regardless of how the
    // selection was spelled.
    selected.sort_by_key(|name| CHECK_NAMES.iter().position(|k| k == name));
    Ok(selected)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    p: (u32, u32),
    s1: (u32, u32),
    s2: (u32, u32),
    checks: Vec<String>,
    out: Option<PathBuf>,
    format: ReportFormat,
    no_timestamp: bool,
) -> Result<i32, CliError> {
    for (name, (lo, hi)) in [("p", p), ("s1", s1), ("s2", s2)] {
        if lo > hi {
            return Err(CliError::bad_input(format!("empty {name} range {lo}..{hi}")));
        }
        if lo < 1 {
            return Err(CliError::bad_input(format!(
                "{name} range must start at 1 or above, got {lo}"
            )));
        }
    }
    let selected = select_checks(&checks)?;
    let mut points = Vec::new();
    for pv in p.0..=p.1 {
        for s1v in s1.0..=s1.1 {
            for s2v in s2.0..=s2.1 {
                points.push((pv, s1v, s2v));
            }
        }
    }

    let mut report = String::new();
    let mut failures = 0usize;
    let mut executed = 0usize;
    let mut failing_lines = Vec::new();
    match format {
        ReportFormat::Jsonl => {
            let reports: Vec<PointReport> = points
                .par_iter()
                .map(|&(pv, s1v, s2v)| evaluate_point(pv, s1v, s2v, &selected))
                .collect();
            for point in &reports {
                let line = point.to_json().to_string();
                if point.failed() {
                    failures += point
                        .results
                        .iter()
                        .filter(|(_, r)| *r == Some(false))
                        .count();
                    failing_lines.push(line.clone());
                }
                executed += point.executed();
                report.push_str(&line);
                report.push('\n');
            }
            let mut summary = serde_json::Map::new();
            summary.insert("points".into(), json!(points.len()));
            summary.insert("checks".into(), json!(executed));
            summary.insert("failures".into(), json!(failures));
            if !no_timestamp {
                let now = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                summary.insert("timestamp_unix_s".into(), json!(now));
            }
            report.push_str(&json!({ "summary": summary }).to_string());
            report.push('\n');
        }
        ReportFormat::Csv => {
            report.push_str("p,s1,s2,t_closed,tau_determinant,match,predicted_group,snf_group,match\n");
            let rows: Vec<(String, bool)> = points
                .par_iter()
                .map(|&(pv, s1v, s2v)| csv_row(pv, s1v, s2v))
                .collect();
            for (row, ok) in rows {
                executed += 2;
                if !ok {
                    failures += 1;
                    failing_lines.push(row.clone());
                }
                report.push_str(&row);
                report.push('\n');
            }
        }
    }

    match &out {
        Some(path) => fs::write(path, &report)
            .map_err(|e| CliError::bad_input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{report}"),
    }
    for line in &failing_lines {
        eprintln!("FAILED {line}");
    }
    println!(
        "{} points, {} checks, {} failures",
        points.len(),
        executed,
        failures
    );
    Ok(if failures > 0 { EXIT_VERIFY_FAILURE } else { 0 })
}
