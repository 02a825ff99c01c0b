//! `lasserre`: batch front end for building gap instances, decomposing moment
//! vectors and certifying PSD-ness with exact rationals.
//!
//! Exit codes: 0 PSD / feasible, 1 not PSD / not certified, 2 unreadable
//! input, 3 invalid level, parameter or schedule, 4 recipe inconclusive but
//! the exact oracle proved PSD.

mod commands;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lasserre_core::rational::{parse_rational, Rational};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_PSD: u8 = 0;
pub const EXIT_NOT_PSD: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_ORACLE_ONLY: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "lasserre", version, about = "Exact PSD certificates for Lasserre relaxations")]
struct Cli {
    /// Write a run report (command, parameters, wall time, outputs, verdicts) here.
    #[arg(long, global = true, value_name = "PATH")]
    run_report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Almost-diagonal form of M_t(w) for a moment vector or a built instance.
    Decompose(DecomposeArgs),
    /// Certify an almost-diagonal form or a symmetric matrix as PSD.
    Certify(CertifyArgs),
    /// Build a gap instance, certify its relaxation solution and report the gap.
    Gap {
        #[command(subcommand)]
        family: GapCommand,
    },
    /// Replay the five-pivot multiple-knapsack trace and diff it against the reference matrices.
    ReplayAppendix(ReplayArgs),
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false, id = "source")]
struct DecomposeSource {
    /// Lattice vector JSON: {n, kind, entries}.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Instance JSON: {family, params}; its constructed solution is decomposed.
    #[arg(long, value_name = "PATH")]
    instance: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DecomposeArgs {
    #[command(flatten)]
    source: DecomposeSource,
    /// Level t.
    #[arg(long)]
    level: usize,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false, id = "target")]
struct CertifySource {
    /// Almost-diagonal form JSON as written by `decompose`.
    #[arg(long, value_name = "PATH")]
    adf: Option<PathBuf>,
    /// Symmetric matrix JSON: {rows, [n, order]}.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CertifyArgs {
    #[command(flatten)]
    source: CertifySource,
    /// Pivot schedule JSON [{H, S}]; only valid with --adf.
    #[arg(long, value_name = "PATH")]
    schedule: Option<PathBuf>,
    /// Check Gershgorin disks only: no greedy pivots, no exact fallback.
    #[arg(long)]
    gershgorin_only: bool,
    /// Include every intermediate working matrix.
    #[arg(long)]
    trace: bool,
    /// Also write the final disks as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GapOutput {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write a per-constraint summary as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Include pivot traces in the recipe certificates.
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GapCommand {
    /// Min-knapsack with P = k·2^(2n+1), certified at level n − 1.
    Knapsack {
        #[arg(long)]
        n: usize,
        /// Requested gap factor.
        #[arg(long, value_parser = rational_arg)]
        #[serde(serialize_with = "ser_rat")]
        k: Rational,
        #[command(flatten)]
        output: GapOutput,
    },
    /// Multiple knapsack with the uniform solution on subsets of size ≤ t + 1.
    Mkp {
        /// Demand ε of each knapsack.
        #[arg(long, value_parser = rational_arg)]
        #[serde(serialize_with = "ser_rat")]
        eps: Rational,
        /// Objective cap T.
        #[arg(long = "T", value_name = "T", value_parser = rational_arg)]
        #[serde(serialize_with = "ser_rat")]
        cap: Rational,
        #[arg(long, default_value_t = 3)]
        knapsacks: usize,
        #[arg(long, default_value_t = 2)]
        items_per: usize,
        /// Relaxation level t.
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Use greedy pivots instead of the built-in reference schedule.
        #[arg(long)]
        no_reference: bool,
        /// Gap required for exit code 0.
        #[arg(long, value_parser = rational_arg, default_value = "1")]
        #[serde(serialize_with = "ser_rat")]
        min_gap: Rational,
        #[command(flatten)]
        output: GapOutput,
    },
    /// Min-sum of tardy jobs: n blocks of n jobs at level n/k − 1.
    Schedule {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational_arg)]
        #[serde(serialize_with = "ser_rat")]
        k: Rational,
        /// Processing-time base P.
        #[arg(long, value_parser = rational_arg, conflicts_with = "find_min_p")]
        #[serde(serialize_with = "ser_opt_rat")]
        p: Option<Rational>,
        /// Search for the smallest integer P at which every covering matrix is PSD.
        #[arg(long)]
        find_min_p: bool,
        #[command(flatten)]
        output: GapOutput,
    },
}

#[derive(Args, Debug, Serialize)]
struct ReplayArgs {
    #[arg(long, value_parser = rational_arg, default_value = "1/16")]
    #[serde(serialize_with = "ser_rat")]
    eps: Rational,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write the final disks as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&lasserre_core::rational::format_rational(r))
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_rat(r, s),
        None => s.serialize_none(),
    }
}

/// What a command produced besides its exit code.
#[derive(Default)]
pub struct Outcome {
    pub code: u8,
    pub outputs: Vec<PathBuf>,
    pub verdicts: BTreeMap<String, Value>,
}

/// A failure mapped to exit code 2 or 3.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn parse(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_PARSE, error: error.into() }
    }

    pub fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_INVALID, error: error.into() }
    }
}

impl From<lasserre_core::Error> for Failure {
    fn from(e: lasserre_core::Error) -> Self {
        match e {
            lasserre_core::Error::Parse(_) => Failure::parse(e),
            _ => Failure::invalid(e),
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decompose(_) => "decompose",
        Command::Certify(_) => "certify",
        Command::Gap { family: GapCommand::Knapsack { .. } } => "gap knapsack",
        Command::Gap { family: GapCommand::Mkp { .. } } => "gap mkp",
        Command::Gap { family: GapCommand::Schedule { .. } } => "gap schedule",
        Command::ReplayAppendix(_) => "replay-appendix",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Decompose(a) => commands::decompose(a),
        Command::Certify(a) => commands::certify(a),
        Command::Gap { family } => commands::gap(family),
        Command::ReplayAppendix(a) => commands::replay(a),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            let mut o = Outcome { code: f.code, ..Outcome::default() };
            o.verdicts.insert("error".into(), json!(format!("{:#}", f.error)));
            o
        }
    };

    if let Some(path) = &cli.run_report {
        let report = json!({
            "command": command_name(&cli.command),
            "parameters": serde_json::to_value(&cli.command).expect("arguments serialize"),
            "timing": { "wall_seconds": start.elapsed().as_secs_f64() },
            "outputs": outcome.outputs,
            "verdicts": outcome.verdicts,
            "exit_code": outcome.code,
        });
        if let Err(e) = std::fs::write(path, lasserre_core::io::pretty(&report)) {
            eprintln!("error: cannot write run report {}: {e}", path.display());
            return ExitCode::from(EXIT_PARSE);
        }
    }
    ExitCode::from(outcome.code)
}
