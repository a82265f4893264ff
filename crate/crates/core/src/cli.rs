//! Command implementations for the `stego-risk` binary.
//!
//! Commands are plain functions from a [`RunConfig`] to an [`Outcome`] so
//! they can be exercised without spawning a process; [`run`] does the I/O.
//!
//! Exit codes: 0 success, 2 domain failure (assumptions violated, degenerate
//! game), 64 usage or configuration error, 74 output could not be written.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tempfile::NamedTempFile;

use crate::analysis::{analytic_sensitivities, numeric_sensitivities, DEFAULT_DELTA};
use crate::equilibrium::{
    expected_adversary_payoffs, expected_defender_payoffs, find_pure_equilibria,
    solve_mixed_closed_form, Player,
};
use crate::error::GameError;
use crate::model::{build_payoff_matrix, validate_assumptions, AssumptionReport, GameParams};
use crate::montecarlo::{
    stream_scenario, ParamRanges, Scenario, ScenarioConfig, SimulationSummary, Stats,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

pub const DEFAULT_RESOLUTION: usize = 101;
pub const CURVES_CSV_HEADER: &str = "mix_weight,e_hide,e_not_hide,e_look,e_not_look";
pub const SENSITIVITY_CSV_HEADER: &str = "partial,analytic,numeric,abs_diff,rel_diff";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Human-readable report, money shown with a £ prefix.
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "stego-risk",
    version,
    about = "Steganography security game analysis"
)]
pub struct Args {
    /// TOML configuration file. Without it the built-in case-study game is used.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the main output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// RNG seed; only `simulate` draws random numbers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the nine modelling assumptions.
    Validate,
    /// Mixed equilibrium, payoffs, residuals and the pure-strategy scan.
    Solve,
    /// Expected-payoff curves against the mixing weight.
    Curves {
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Analytic versus central-difference equilibrium sensitivities.
    Sensitivity {
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Monte Carlo risk simulation.
    Simulate {
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        scenario: Option<Scenario>,
        /// Per-record CSV destination.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
}

/// Configuration file contents. Every section is optional; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: Option<GameParams>,
    pub scenario: Option<ScenarioSection>,
    pub output: Option<OutputSection>,
    pub sensitivity: Option<SensitivitySection>,
    pub curves: Option<CurvesSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: Option<Scenario>,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
    pub ranges: Option<ParamRanges>,
    pub beta_a: Option<f64>,
    pub beta_b: Option<f64>,
    pub adv_min: Option<f64>,
    pub beta_fixed: Option<f64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
    pub records: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesSection {
    pub resolution: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The config used when no file is given.
    pub fn case_study() -> Self {
        RunConfig {
            game: Some(GameParams::CASE_STUDY),
            ..RunConfig::default()
        }
    }

    pub fn game(&self) -> Result<GameParams, CliError> {
        let game = self
            .game
            .ok_or_else(|| CliError::Usage("config has no [game] section".into()))?;
        game.ensure_in_domain()
            .map_err(|e| CliError::Usage(format!("[game]: {e}")))?;
        Ok(game)
    }

    fn format(&self) -> Option<Format> {
        self.output.as_ref().and_then(|o| o.format)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// A command's main output and the exit status it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: u8,
    pub body: String,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome {
            status: EXIT_OK,
            body,
        }
    }
}

fn unsupported(cmd: &str, format: Format) -> CliError {
    CliError::Usage(format!("format {format:?} is not supported by `{cmd}`").to_lowercase())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// `£1,234.56` style, sign after the currency symbol.
pub fn format_money(x: f64) -> String {
    let cents = (x.abs() * 100.0).round() as u128;
    let whole = (cents / 100).to_string();
    let mut grouped = String::new();
    for (i, ch) in whole.chars().enumerate() {
        if i > 0 && (whole.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let sign = if x < 0.0 && cents > 0 { "-" } else { "" };
    format!("£{sign}{grouped}.{:02}", cents % 100)
}

fn report_json(report: &AssumptionReport) -> serde_json::Value {
    let checks: Vec<_> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "assumption": c.id,
                "formula": c.id.formula(),
                "holds": c.holds,
                "lhs": c.lhs,
                "rhs": c.rhs,
            })
        })
        .collect();
    json!({ "valid": report.valid(), "checks": checks })
}

pub fn cmd_validate(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let game = config.game()?;
    let report = validate_assumptions(&game).map_err(|e| CliError::Usage(e.to_string()))?;
    let body = match format {
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{} {:<28} {:<28} {} {} {}",
                    if c.holds { "PASS" } else { "FAIL" },
                    c.id.name(),
                    c.id.formula(),
                    c.lhs,
                    c.relation.symbol(),
                    c.rhs
                );
            }
            let _ = writeln!(
                s,
                "{}",
                if report.valid() {
                    "all assumptions hold"
                } else {
                    "assumptions violated"
                }
            );
            s
        }
        Format::Json => to_json(&report_json(&report)),
        Format::Csv => {
            let mut s = String::from("assumption,formula,holds,lhs,rhs\n");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    c.id.name(),
                    c.id.formula(),
                    c.holds,
                    c.lhs,
                    c.rhs
                );
            }
            s
        }
    };
    Ok(Outcome {
        status: if report.valid() { EXIT_OK } else { EXIT_DOMAIN },
        body,
    })
}

fn require_valid(game: &GameParams) -> Result<(), CliError> {
    let report = validate_assumptions(game).map_err(|e| CliError::Usage(e.to_string()))?;
    if report.valid() {
        return Ok(());
    }
    let failed: Vec<_> = report
        .failures()
        .map(|c| format!("{} ({})", c.id.name(), c.id.formula()))
        .collect();
    Err(CliError::Domain(format!(
        "assumptions violated: {}",
        failed.join(", ")
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub p_star: f64,
    pub q_star: f64,
    pub defender_payoff: f64,
    pub adversary_payoff: f64,
    pub residuals: ResidualPair,
    pub pure_equilibria: Vec<crate::equilibrium::Profile>,
    pub deviations: Vec<crate::equilibrium::Deviation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPair {
    pub a: f64,
    pub u: f64,
}

pub fn solve_report(game: &GameParams) -> Result<SolveReport, CliError> {
    require_valid(game)?;
    let eq = solve_mixed_closed_form(game)?;
    let defender = expected_defender_payoffs(game, eq.q_star)?;
    let adversary = expected_adversary_payoffs(game, eq.p_star)?;
    let scan = find_pure_equilibria(&build_payoff_matrix(game));
    Ok(SolveReport {
        p_star: eq.p_star,
        q_star: eq.q_star,
        defender_payoff: defender.hide,
        adversary_payoff: adversary.look,
        residuals: ResidualPair {
            a: eq.residual_adversary,
            u: eq.residual_defender,
        },
        pure_equilibria: scan.equilibria,
        deviations: scan.deviations,
    })
}

pub fn cmd_solve(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let game = config.game()?;
    let report = solve_report(&game)?;
    let body = match format {
        Format::Json => to_json(&report),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "p* = {}", report.p_star);
            let _ = writeln!(s, "q* = {}", report.q_star);
            let _ = writeln!(
                s,
                "defender equilibrium payoff  {}",
                format_money(report.defender_payoff)
            );
            let _ = writeln!(
                s,
                "adversary equilibrium payoff {}",
                format_money(report.adversary_payoff)
            );
            let _ = writeln!(
                s,
                "indifference residuals: adversary {}, defender {}",
                report.residuals.a, report.residuals.u
            );
            if report.pure_equilibria.is_empty() {
                let _ = writeln!(s, "no pure equilibrium");
            }
            for (d, a) in &report.pure_equilibria {
                let _ = writeln!(s, "pure equilibrium ({d}, {a})");
            }
            for dev in &report.deviations {
                let who = match dev.player {
                    Player::Defender => "defender",
                    Player::Adversary => "adversary",
                };
                let _ = writeln!(
                    s,
                    "({}, {}) -> ({}, {}): {who} gains {} > {}",
                    dev.profile.0,
                    dev.profile.1,
                    dev.to.0,
                    dev.to.1,
                    format_money(dev.payoff_after),
                    format_money(dev.payoff_before)
                );
            }
            s
        }
        Format::Csv => return Err(unsupported("solve", format)),
    };
    Ok(Outcome::ok(body))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub mix_weight: f64,
    pub e_hide: f64,
    pub e_not_hide: f64,
    pub e_look: f64,
    pub e_not_look: f64,
}

/// Payoff curves at `resolution` evenly spaced weights, both ends included.
pub fn payoff_curves(game: &GameParams, resolution: usize) -> Result<Vec<CurveRow>, CliError> {
    if resolution < 2 {
        return Err(CliError::Usage(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let last = (resolution - 1) as f64;
    (0..resolution)
        .map(|i| {
            let w = i as f64 / last;
            let u = expected_defender_payoffs(game, w)?;
            let a = expected_adversary_payoffs(game, w)?;
            Ok(CurveRow {
                mix_weight: w,
                e_hide: u.hide,
                e_not_hide: u.not_hide,
                e_look: a.look,
                e_not_look: a.not_look,
            })
        })
        .collect()
}

pub fn cmd_curves(
    config: &RunConfig,
    resolution: Option<usize>,
    format: Format,
) -> Result<Outcome, CliError> {
    let game = config.game()?;
    let resolution = resolution
        .or(config.curves.as_ref().and_then(|c| c.resolution))
        .unwrap_or(DEFAULT_RESOLUTION);
    let rows = payoff_curves(&game, resolution)?;
    let body = match format {
        Format::Csv => {
            let mut s = format!("{CURVES_CSV_HEADER}\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.mix_weight, r.e_hide, r.e_not_hide, r.e_look, r.e_not_look
                );
            }
            s
        }
        Format::Json => to_json(&rows),
        Format::Text => return Err(unsupported("curves", format)),
    };
    Ok(Outcome::ok(body))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub partial: String,
    pub analytic: f64,
    pub numeric: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

pub fn sensitivity_table(game: &GameParams, delta: f64) -> Result<Vec<SensitivityRow>, CliError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CliError::Usage(format!(
            "delta must be positive, got {delta}"
        )));
    }
    require_valid(game)?;
    let analytic = analytic_sensitivities(game)?;
    let numeric = numeric_sensitivities(game, delta)?;
    Ok(analytic
        .iter()
        .map(|(k, a)| {
            let n = numeric.get(k);
            let abs_diff = (n - a).abs();
            let rel_diff = if a == 0.0 {
                abs_diff
            } else {
                abs_diff / a.abs()
            };
            SensitivityRow {
                partial: k.name().to_string(),
                analytic: a,
                numeric: n,
                abs_diff,
                rel_diff,
            }
        })
        .collect())
}

pub fn cmd_sensitivity(
    config: &RunConfig,
    delta: Option<f64>,
    format: Format,
) -> Result<Outcome, CliError> {
    let game = config.game()?;
    let delta = delta
        .or(config.sensitivity.as_ref().and_then(|s| s.delta))
        .unwrap_or(DEFAULT_DELTA);
    let rows = sensitivity_table(&game, delta)?;
    let body = match format {
        Format::Csv => {
            let mut s = format!("{SENSITIVITY_CSV_HEADER}\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.partial, r.analytic, r.numeric, r.abs_diff, r.rel_diff
                );
            }
            s
        }
        Format::Json => to_json(&json!({ "delta": delta, "rows": rows })),
        Format::Text => {
            let mut s = format!("central differences with delta = {delta}\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<13} analytic {:>14.6e}  numeric {:>14.6e}  rel diff {:.3e}",
                    r.partial, r.analytic, r.numeric, r.rel_diff
                );
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

/// Command-line overrides for `simulate`.
#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub seed: Option<u64>,
    pub iterations: Option<u64>,
    pub scenario: Option<Scenario>,
    pub workers: Option<usize>,
}

/// Merges the `[scenario]` section with flags; flags win.
pub fn scenario_config(
    config: &RunConfig,
    opts: &SimulateOptions,
) -> Result<ScenarioConfig, CliError> {
    let section = config.scenario.clone().unwrap_or_default();
    let scenario = opts.scenario.or(section.kind).unwrap_or(Scenario::Positive);
    let seed = opts.seed.or(section.seed).unwrap_or(0);
    let mut sc = ScenarioConfig::new(scenario, seed);
    if let Some(n) = opts.iterations.or(section.iterations) {
        sc.iterations = n;
    }
    if let Some(r) = section.ranges {
        sc.ranges = r;
    }
    if let Some(a) = section.beta_a {
        sc.beta_a = a;
    }
    if let Some(b) = section.beta_b {
        sc.beta_b = b;
    }
    if let Some(m) = section.adv_min {
        sc.adv_min = m;
    }
    sc.beta_fixed = section.beta_fixed;
    sc.validate()
        .map_err(|e| CliError::Usage(format!("[scenario]: {e}")))?;
    Ok(sc)
}

fn stats_json(s: &Stats) -> serde_json::Value {
    json!({ "mean": s.mean, "min": s.min, "max": s.max })
}

pub fn summary_json(summary: &SimulationSummary) -> String {
    to_json(&json!({
        "scenario": summary.scenario,
        "iterations": summary.iterations,
        "seed": summary.seed,
        "advantage": stats_json(&summary.advantage),
        "risk": stats_json(&summary.risk),
        "histogram": {
            "p_cells": summary.histogram.p_cells,
            "q_cells": summary.histogram.q_cells,
            "counts": summary.histogram.counts,
        },
    }))
}

fn summary_text(summary: &SimulationSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} advantage scenario, {} iterations, seed {}",
        summary.scenario, summary.iterations, summary.seed
    );
    let a = summary.advantage;
    let r = summary.risk;
    let _ = writeln!(s, "mean advantage     {:.4}", a.mean);
    let _ = writeln!(s, "minimum advantage  {:.4}", a.min);
    let _ = writeln!(s, "maximum advantage  {:.4}", a.max);
    let _ = writeln!(s, "mean risk          {}", format_money(r.mean));
    let _ = writeln!(s, "minimum risk       {}", format_money(r.min));
    let _ = writeln!(s, "maximum risk       {}", format_money(r.max));
    s
}

/// Runs the simulation, streaming per-record CSV into `records` when given.
pub fn cmd_simulate<W: Write>(
    config: &RunConfig,
    opts: &SimulateOptions,
    format: Format,
    records: Option<&mut W>,
) -> Result<Outcome, CliError> {
    if format == Format::Csv {
        return Err(unsupported("simulate", format));
    }
    let sc = scenario_config(config, opts)?;
    let workers = opts
        .workers
        .or(config.scenario.as_ref().and_then(|s| s.workers));
    let summary = match records {
        Some(out) => stream_scenario(&sc, workers, out),
        None => stream_scenario(&sc, workers, &mut io::sink()),
    }
    .map_err(|e| match e {
        crate::SimulationError::Io(io) => CliError::Io(io),
        other => CliError::Domain(other.to_string()),
    })?;
    let body = match format {
        Format::Text => summary_text(&summary),
        _ => summary_json(&summary),
    };
    Ok(Outcome::ok(body))
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = temp_beside(path)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn temp_beside(path: &Path) -> io::Result<NamedTempFile> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    NamedTempFile::new_in(dir)
}

fn default_format(command: &Command) -> Format {
    match command {
        Command::Validate | Command::Solve => Format::Text,
        Command::Curves { .. } | Command::Sensitivity { .. } => Format::Csv,
        Command::Simulate { .. } => Format::Json,
    }
}

fn execute(args: &Args) -> Result<Outcome, CliError> {
    let config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::case_study(),
    };
    let format = args
        .format
        .or(config.format())
        .unwrap_or_else(|| default_format(&args.command));

    let outcome = match &args.command {
        Command::Validate => cmd_validate(&config, format)?,
        Command::Solve => cmd_solve(&config, format)?,
        Command::Curves { resolution } => cmd_curves(&config, *resolution, format)?,
        Command::Sensitivity { delta } => cmd_sensitivity(&config, *delta, format)?,
        Command::Simulate {
            iterations,
            scenario,
            records,
            workers,
        } => {
            let opts = SimulateOptions {
                seed: args.seed,
                iterations: *iterations,
                scenario: *scenario,
                workers: *workers,
            };
            let records_path = records
                .clone()
                .or(config.output.as_ref().and_then(|o| o.records.clone()));
            match records_path {
                Some(path) => {
                    let tmp = temp_beside(&path)?;
                    let mut writer = io::BufWriter::new(tmp);
                    let outcome = cmd_simulate(&config, &opts, format, Some(&mut writer))?;
                    let tmp = writer.into_inner().map_err(|e| e.into_error())?;
                    tmp.as_file().sync_all()?;
                    tmp.persist(&path).map_err(|e| e.error)?;
                    outcome
                }
                None => cmd_simulate::<io::Sink>(&config, &opts, format, None)?,
            }
        }
    };

    let output = args
        .output
        .clone()
        .or(config.output.as_ref().and_then(|o| o.path.clone()));
    match output {
        Some(path) => write_atomic(&path, outcome.body.as_bytes())?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(outcome.body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(outcome)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(args: &Args) -> u8 {
    match execute(args) {
        Ok(outcome) => outcome.status,
        Err(e) => {
            eprintln!("stego-risk: {e}");
            e.exit_code()
        }
    }
}
