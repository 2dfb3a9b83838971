//! Command-line surface. `main` only parses arguments and maps the outcome
//! to an exit code: 0 success, 2 usage or input error, 1 internal error.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::estimation::{self, read_records, NormalizationBounds};
use crate::format::ser_fixed6;
use crate::policy::AdaptationPolicy;
use crate::sim::{self, compute_metrics, PolicyMode, Scenario, SimEngine, METRICS_CSV_HEADER};
use crate::trust::{self, TrustInferenceSystem, TrustLevel, UserState};

pub const OUT_DIR_ENV: &str = "TRUST_XAI_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "trust-xai", version, about = "Fuzzy trust inference and adaptive explanation engine")]
pub struct Cli {
    /// Trust system JSON replacing the built-in one.
    #[arg(long, global = true, value_name = "FILE")]
    pub system: Option<PathBuf>,
    /// Adaptation rule JSON (array of rules) replacing the built-in policy.
    #[arg(long, global = true, value_name = "FILE")]
    pub policy_file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer trust for a single state.
    Infer {
        #[arg(long, value_parser = unit_interval, allow_negative_numbers = true)]
        w: f64,
        #[arg(long, value_parser = unit_interval, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, value_parser = signed_unit_interval, allow_negative_numbers = true)]
        e: f64,
        #[arg(long, value_parser = unit_interval, allow_negative_numbers = true)]
        p: f64,
        /// Print the full estimate as JSON instead of the text trace.
        #[arg(long)]
        json: bool,
    },
    /// Run one scenario and write its trajectory and metrics.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyMode::Adaptive)]
        policy: PolicyMode,
        /// Overrides the scenario's own seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
    },
    /// Stream signal-window records through estimation and trust inference.
    Replay {
        records: PathBuf,
        /// Abort on the first malformed line.
        #[arg(long)]
        strict: bool,
        /// Write trust JSONL here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export a variable's membership curves as CSV.
    Membership {
        #[arg(long)]
        variable: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Compare Adaptive against the static baselines over a scenario set.
    Compare {
        /// Directory of scenario JSON files.
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
    },
}

fn parse_in(s: &str, lo: f64, hi: f64) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(lo..=hi).contains(&v) {
        return Err(format!("{v} is outside [{lo}, {hi}]"));
    }
    Ok(v)
}

fn unit_interval(s: &str) -> Result<f64, String> {
    parse_in(s, 0.0, 1.0)
}

fn signed_unit_interval(s: &str) -> Result<f64, String> {
    parse_in(s, -1.0, 1.0)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: missing files, malformed documents, invalid arguments.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl CliError {
    /// The reader went away (e.g. piped into `head`); not worth reporting.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, CliError::Internal(e) if e.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Internal(anyhow::anyhow!("writing {}: {e}", path.display())))
}

/// Creates `dir` and proves it is writable before any long work starts.
fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    let fail = |e: io::Error| input(format!("output directory {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(".write-check");
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)
}

fn load_system(path: Option<&Path>) -> Result<TrustInferenceSystem, CliError> {
    match path {
        Some(p) => TrustInferenceSystem::from_json(&read_input(p)?).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => Ok(trust::build_default_trust_system()),
    }
}

fn load_engine(cli_system: Option<&Path>, policy_file: Option<&Path>) -> Result<SimEngine, CliError> {
    let trust = load_system(cli_system)?;
    let policy = match policy_file {
        Some(p) => AdaptationPolicy::from_json(&read_input(p)?, trust.inputs().to_vec())
            .map_err(|e| input(format!("{}: {e}", p.display())))?,
        None => crate::policy::build_default_policy(),
    };
    Ok(SimEngine::new(trust, policy))
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let system = cli.system.as_deref();
    let policy_file = cli.policy_file.as_deref();
    match cli.command {
        Command::Infer { w, s, e, p, json } => cmd_infer(&load_system(system)?, [w, s, e, p], json, out),
        Command::Run { scenario, policy, seed, out: dir } => {
            cmd_run(&load_engine(system, policy_file)?, &scenario, policy, seed, &dir, out)
        }
        Command::Replay { records, strict, output } => {
            cmd_replay(&load_system(system)?, &records, strict, output.as_deref(), out)
        }
        Command::Membership { variable, samples } => cmd_membership(&load_system(system)?, &variable, samples, out),
        Command::Compare { scenarios, seeds, out: dir } => {
            cmd_compare(&load_engine(system, policy_file)?, &scenarios, &seeds, &dir, out)
        }
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Internal(e.into())
}

pub fn cmd_infer(
    sys: &TrustInferenceSystem,
    [w, s, e, p]: [f64; 4],
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let state = UserState::new(0, w, s, e, p).map_err(input)?;
    let est = trust::infer_trust(sys, &state).map_err(|e| CliError::Internal(e.into()))?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&est).map_err(anyhow::Error::from)?).map_err(io_err)?;
        return Ok(());
    }
    writeln!(out, "label: {}", est.label.as_str()).map_err(io_err)?;
    writeln!(out, "score: {:.3}", est.score).map_err(io_err)?;
    let fired: Vec<String> = est.fired().map(|f| format!("{}={:.3}", f.rule_id, f.activation)).collect();
    writeln!(out, "fired: {}", if fired.is_empty() { "none".to_string() } else { fired.join(" ") }).map_err(io_err)?;
    let trace = trust::explain_inference(&est);
    write!(out, "{trace}").map_err(io_err)?;
    if !trace.ends_with('\n') {
        writeln!(out).map_err(io_err)?;
    }
    Ok(())
}

pub fn run_file_stem(scn: &Scenario, policy: PolicyMode, seed: u64) -> String {
    format!("{}_{}_seed{}", scn.name, policy, seed)
}

pub fn cmd_run(
    engine: &SimEngine,
    path: &Path,
    policy: PolicyMode,
    seed: Option<u64>,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let scn = Scenario::from_json(&read_input(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    prepare_out_dir(dir)?;
    let seed = seed.unwrap_or(scn.seed);
    let log = engine.run_seeded(&scn, seed, policy).map_err(|e| CliError::Internal(e.into()))?;
    let metrics = compute_metrics(&log).map_err(|e| CliError::Internal(e.into()))?;
    let stem = run_file_stem(&scn, policy, seed);
    write_output(&dir.join(format!("{stem}.jsonl")), &log.to_jsonl())?;
    write_output(
        &dir.join(format!("{stem}_metrics.csv")),
        &format!("{METRICS_CSV_HEADER}\n{},{seed},{policy},{}\n", scn.name, metrics.csv_fields()),
    )?;
    let last = log.last().expect("validated scenarios have steps");
    writeln!(
        out,
        "{} [{policy}, seed {seed}]: final trust {} ({:.3}), mean workload {:.3}",
        scn.name,
        last.trust.label.as_str(),
        last.trust.score,
        metrics.mean_workload
    )
    .map_err(io_err)
}

#[derive(Serialize)]
struct ReplayLine<'a> {
    line: usize,
    step: u64,
    #[serde(serialize_with = "ser_fixed6")]
    workload: f64,
    #[serde(serialize_with = "ser_fixed6")]
    stress: f64,
    #[serde(serialize_with = "ser_fixed6")]
    valence: f64,
    #[serde(serialize_with = "ser_fixed6")]
    performance: f64,
    #[serde(serialize_with = "ser_fixed6")]
    trust_score: f64,
    trust_label: TrustLevel,
    fallback_used: bool,
    fired_rules: Vec<&'a str>,
}

/// Reads all records up front (lenient or strict), then estimates and infers
/// in file order. A window that parses but cannot be estimated counts as skipped.
pub fn cmd_replay(
    sys: &TrustInferenceSystem,
    path: &Path,
    strict: bool,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let file = fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let (records, mut skipped) = read_records(BufReader::new(file), strict).map_err(input)?;
    let bounds = NormalizationBounds::default();
    let mut prev: Option<UserState> = None;
    let mut prev_est = None;
    let mut text = String::new();
    for (line, rec) in records {
        let state = match estimation::estimate_state(&rec.window, rec.events.as_ref(), prev.as_ref(), &bounds) {
            Ok(s) => s,
            Err(e) => {
                let err = estimation::LineError { line, message: e.to_string() };
                if strict {
                    return Err(input(err));
                }
                skipped.push(err);
                continue;
            }
        };
        let est = trust::infer_trust_with_previous(sys, &state, prev_est.as_ref())
            .map_err(|e| CliError::Internal(e.into()))?;
        let row = ReplayLine {
            line,
            step: state.step,
            workload: state.workload,
            stress: state.stress,
            valence: state.valence,
            performance: state.performance,
            trust_score: est.score,
            trust_label: est.label,
            fallback_used: est.fallback_used,
            fired_rules: est.fired().map(|f| f.rule_id.as_str()).collect(),
        };
        text.push_str(&serde_json::to_string(&row).map_err(anyhow::Error::from)?);
        text.push('\n');
        prev = Some(state);
        prev_est = Some(est);
    }
    match output {
        Some(p) => write_output(p, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    skipped.sort_by_key(|e| e.line);
    eprintln!("skipped {} line(s)", skipped.len());
    for e in &skipped {
        eprintln!("  {e}");
    }
    Ok(())
}

pub fn cmd_membership(
    sys: &TrustInferenceSystem,
    name: &str,
    samples: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let var = sys.variable(name).ok_or_else(|| {
        let known: Vec<&str> = sys.inputs().iter().chain([sys.output()]).map(|v| v.name()).collect();
        input(format!("unknown variable `{name}` (known: {})", known.join(", ")))
    })?;
    let csv = var.to_csv(samples).map_err(input)?;
    out.write_all(csv.as_bytes()).map_err(io_err)
}

/// Loads every `*.json` in `dir`, sorted by file name.
pub fn load_scenario_dir(dir: &Path) -> Result<Vec<Scenario>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(input(format!("{}: no scenario files", dir.display())));
    }
    paths
        .iter()
        .map(|p| Scenario::from_json(&read_input(p)?).map_err(|e| input(format!("{}: {e}", p.display()))))
        .collect()
}

pub fn cmd_compare(
    engine: &SimEngine,
    dir: &Path,
    seeds: &[u64],
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let scenarios = load_scenario_dir(dir)?;
    if seeds.is_empty() {
        return Err(input("at least one seed is required"));
    }
    prepare_out_dir(out_dir)?;
    let report = sim::compare_policies_with(engine, &scenarios, seeds, &PolicyMode::ALL)
        .map_err(|e| CliError::Internal(e.into()))?;
    let summary = report.summary();
    write_output(&out_dir.join("comparison.csv"), &report.to_csv())?;
    write_output(&out_dir.join("comparison_deltas.csv"), &report.deltas_csv())?;
    write_output(&out_dir.join("comparison_summary.txt"), &summary)?;
    out.write_all(summary.as_bytes()).map_err(io_err)
}
