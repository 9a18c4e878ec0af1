//! `nlgames` command-line front end.
//!
//! Subcommands: `exact`, `run`, `enumerate`, `verify`, `game3-report`.
//! Exit codes: 0 success, 1 usage error, 2 contract or verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    brute_force_uniform_win_prob, enumerate_deterministic, uniform_win_prob, DeterministicStrategyPair, ExactProb,
    MAX_ENUMERATION_ROUNDS,
};
use crate::games::{Answer, GameId, GameSpec};
use crate::harness::{
    game3_dual_report, quantum_players, run_game, run_game_recorded, verify_eigen_relations, write_transcripts_csv,
    BellState, EigenCheck, Game3DualReport, HarnessError, Players, RunReport,
};

/// Significant digits used when rendering exact fractions as decimals.
pub const DECIMAL_DIGITS: usize = 12;

const CSV_HELP: &str = "\
CSV columns by command:
  exact        game_id,n,exact,decimal,brute_force,cross_check,warning
  run          game_id,n,trials,wins,win_frequency,exact_reference,eigen_checks_passed,eigen_checks_total,seed,promise_violations
  run --transcripts FILE
               trial,round_index,q_a,q_b,a,b
  enumerate    game_id,n,alice_x,alice_xbar,bob_x,bob_xbar,win_prob,decimal,is_max
  verify       observable,state,eigenvalue,residual,passed
  game3-report game_id,trials,wins,product_condition_count,inverse_condition_count,product_condition_rate,inverse_condition_rate,eigen_check_passed,seed";

#[derive(Debug, Parser)]
#[command(name = "nlgames", version, about = "Exact values and simulations of two-party nonlocal games", after_help = CSV_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact uniform-random win probabilities for n = 1..rounds, with a brute-force cross-check
    Exact(Options),
    /// Monte-Carlo run of one game against a strategy pair
    Run(Options),
    /// All 16 deterministic strategy pairs and their exact win probabilities
    Enumerate(Options),
    /// Check the eigenvalue relations behind the quantum strategies
    Verify(Options),
    /// Game 3 with phi_plus players: clause rates plus the operator-level check
    #[command(name = "game3-report")]
    Game3Report(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyChoice {
    Uniform,
    Quantum,
    BestDeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Game number
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub game: u8,
    /// Round count n (forced to 1 for game 3)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub rounds: u64,
    /// Monte-Carlo trials
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = StrategyChoice::Uniform)]
    pub strategy: StrategyChoice,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// `run` only: also write every transcript as CSV
    #[arg(long)]
    pub transcripts: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Exact,
    Run,
    Enumerate,
    Verify,
    Game3Report,
}

/// Flags after defaults and game-specific overrides are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: CommandName,
    pub game: GameId,
    pub rounds: usize,
    pub trials: u64,
    pub strategy: StrategyChoice,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub transcripts: Option<PathBuf>,
}

impl CliConfig {
    pub fn from_cli(cli: Cli) -> Result<CliConfig, CliError> {
        let (command, opts) = match cli.command {
            Command::Exact(o) => (CommandName::Exact, o),
            Command::Run(o) => (CommandName::Run, o),
            Command::Enumerate(o) => (CommandName::Enumerate, o),
            Command::Verify(o) => (CommandName::Verify, o),
            Command::Game3Report(o) => (CommandName::Game3Report, o),
        };
        let game = match opts.game {
            1 => GameId::Game1,
            2 => GameId::Game2,
            _ => GameId::Game3,
        };
        let rounds = if game == GameId::Game3 {
            1
        } else {
            usize::try_from(opts.rounds).map_err(|_| CliError::Usage(format!("--rounds {} too large", opts.rounds)))?
        };
        if opts.transcripts.is_some() && command != CommandName::Run {
            return Err(CliError::Usage("--transcripts is only valid with `run`".into()));
        }
        Ok(CliConfig {
            command,
            game,
            rounds,
            trials: opts.trials,
            strategy: opts.strategy,
            seed: opts.seed,
            format: opts.format,
            output: opts.output,
            transcripts: opts.transcripts,
        })
    }

    pub fn spec(&self) -> GameSpec {
        GameSpec::from_id(self.game, self.rounds).expect("rounds >= 1 enforced by the parser")
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Contract(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Contract(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Contract(_) => 2,
            // failing to write output is reported like a usage problem (bad path)
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

/// Rendered command output plus whether every check in it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub ok: bool,
    /// Printed to stderr.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossCheck {
    Match,
    Mismatch,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub game_id: GameId,
    pub n: usize,
    pub exact: ExactProb,
    pub decimal: String,
    pub brute_force: Option<ExactProb>,
    pub cross_check: CrossCheck,
    pub warning: Option<String>,
}

/// Closed-form values for n = 1..rounds (a single row for game 3), each
/// cross-checked by enumeration while n is within the cap.
pub fn cmd_exact(config: &CliConfig) -> Vec<ExactRow> {
    (1..=config.rounds)
        .map(|n| {
            let spec = GameSpec::from_id(config.game, n).expect("n >= 1");
            let exact = uniform_win_prob(&spec);
            let (brute_force, cross_check, warning) = match brute_force_uniform_win_prob(&spec, MAX_ENUMERATION_ROUNDS)
            {
                Ok(bf) => {
                    let check = if bf == exact {
                        CrossCheck::Match
                    } else {
                        CrossCheck::Mismatch
                    };
                    (Some(bf), check, None)
                }
                Err(e) => (None, CrossCheck::Skipped, Some(format!("cross-check omitted: {e}"))),
            };
            ExactRow {
                game_id: config.game,
                n,
                decimal: exact.to_decimal_string(DECIMAL_DIGITS),
                exact,
                brute_force,
                cross_check,
                warning,
            }
        })
        .collect()
}

fn players_for(config: &CliConfig) -> Players {
    let spec = config.spec();
    match config.strategy {
        StrategyChoice::Uniform => Players::uniform(),
        StrategyChoice::Quantum => match config.game {
            GameId::Game1 => quantum_players(BellState::Singlet),
            GameId::Game2 | GameId::Game3 => quantum_players(BellState::PhiPlus),
        },
        StrategyChoice::BestDeterministic => Players::deterministic(best_deterministic(&spec)),
    }
}

/// First pair (in enumeration order) attaining the deterministic maximum.
pub fn best_deterministic(spec: &GameSpec) -> DeterministicStrategyPair {
    let rows = enumerate_deterministic(spec);
    let best = rows.iter().map(|(_, p)| p).max().expect("16 pairs").clone();
    rows.into_iter().find(|(_, p)| *p == best).expect("maximum exists").0
}

/// Runs the configured game. With `transcripts` set, every transcript is
/// written there as CSV.
pub fn cmd_run(config: &CliConfig) -> Result<RunReport, CliError> {
    let spec = config.spec();
    let players = players_for(config);
    let report = match &config.transcripts {
        Some(path) => {
            let (report, transcripts) = run_game_recorded(&spec, &players, config.trials, config.seed)?;
            write_transcripts_csv(&transcripts, io::BufWriter::new(File::create(path)?))?;
            report
        }
        None => run_game(&spec, &players, config.trials, config.seed)?,
    };
    if report.promise_violations > 0 {
        return Err(CliError::Contract(format!(
            "{} promise violations",
            report.promise_violations
        )));
    }
    Ok(report)
}

pub fn cmd_verify(_config: &CliConfig) -> Vec<EigenCheck> {
    verify_eigen_relations()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub game_id: GameId,
    pub n: usize,
    pub alice_x: Answer,
    pub alice_xbar: Answer,
    pub bob_x: Answer,
    pub bob_xbar: Answer,
    pub win_prob: ExactProb,
    pub decimal: String,
    pub is_max: bool,
}

pub fn cmd_enumerate(config: &CliConfig) -> Vec<StrategyRow> {
    let spec = config.spec();
    let rows = enumerate_deterministic(&spec);
    let best = rows.iter().map(|(_, p)| p.clone()).max().expect("16 pairs");
    rows.into_iter()
        .map(|(pair, p)| StrategyRow {
            game_id: spec.game_id(),
            n: spec.rounds(),
            alice_x: pair.alice.x,
            alice_xbar: pair.alice.xbar,
            bob_x: pair.bob.x,
            bob_xbar: pair.bob.xbar,
            decimal: p.to_decimal_string(DECIMAL_DIGITS),
            is_max: p == best,
            win_prob: p,
        })
        .collect()
}

pub fn cmd_game3_report(config: &CliConfig) -> Result<Game3DualReport, CliError> {
    Ok(game3_dual_report(config.trials, config.seed)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut out = csv::Writer::from_writer(Vec::new());
    for row in rows {
        out.serialize(row)?;
    }
    let bytes = out.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn render_exact(rows: &[ExactRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(rows),
        Format::Text => {
            let mut s = format!(
                "{:>4}  {:>24}  {:>16}  {:>24}  {}\n",
                "n", "exact", "decimal", "brute_force", "check"
            );
            for r in rows {
                let check = match r.cross_check {
                    CrossCheck::Match => "match".to_string(),
                    CrossCheck::Mismatch => "MISMATCH".to_string(),
                    CrossCheck::Skipped => format!("skipped ({})", opt(&r.warning)),
                };
                let _ = writeln!(
                    s,
                    "{:>4}  {:>24}  {:>16}  {:>24}  {}",
                    r.n,
                    r.exact.to_string(),
                    r.decimal,
                    opt(&r.brute_force),
                    check
                );
            }
            Ok(s)
        }
    }
}

fn render_run(report: &RunReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            Ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "game               {}", report.game_id);
            let _ = writeln!(s, "rounds             {}", report.n);
            let _ = writeln!(s, "trials             {}", report.trials);
            let _ = writeln!(s, "wins               {}", report.wins);
            let _ = writeln!(s, "win_frequency      {}", report.win_frequency);
            let reference = report
                .exact_reference
                .as_ref()
                .map(|p| format!("{p} ({})", p.to_decimal_string(DECIMAL_DIGITS)));
            let _ = writeln!(s, "exact_reference    {}", opt(&reference));
            let _ = writeln!(s, "promise_violations {}", report.promise_violations);
            let _ = writeln!(s, "seed               {}", report.seed);
            for c in &report.eigen_checks {
                let _ = writeln!(s, "eigen              {}", eigen_line(c));
            }
            Ok(s)
        }
    }
}

fn eigen_line(c: &EigenCheck) -> String {
    format!(
        "{} |{}> = {:+} |{}>  residual {:.3e}  {}",
        c.observable,
        c.state,
        c.eigenvalue,
        c.state,
        c.residual,
        if c.passed { "pass" } else { "FAIL" }
    )
}

fn render_verify(checks: &[EigenCheck], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(&checks),
        Format::Csv => to_csv(checks),
        Format::Text => Ok(checks.iter().map(|c| eigen_line(c) + "\n").collect()),
    }
}

fn render_enumerate(rows: &[StrategyRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(rows),
        Format::Text => {
            let mut s = format!(
                "{:>7} {:>10} {:>7} {:>10}  {:>12}  {}\n",
                "alice_x", "alice_xbar", "bob_x", "bob_xbar", "win_prob", ""
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:>7} {:>10} {:>7} {:>10}  {:>12}  {}",
                    r.alice_x.to_string(),
                    r.alice_xbar.to_string(),
                    r.bob_x.to_string(),
                    r.bob_xbar.to_string(),
                    r.win_prob.to_string(),
                    if r.is_max { "<- max" } else { "" }
                );
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct Game3CsvRow {
    game_id: GameId,
    trials: u64,
    wins: u64,
    product_condition_count: u64,
    inverse_condition_count: u64,
    product_condition_rate: f64,
    inverse_condition_rate: f64,
    eigen_check_passed: bool,
    seed: u64,
}

fn render_game3(dual: &Game3DualReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(dual),
        Format::Csv => to_csv(&[Game3CsvRow {
            game_id: dual.report.game_id,
            trials: dual.report.trials,
            wins: dual.report.wins,
            product_condition_count: dual.product_condition_count,
            inverse_condition_count: dual.inverse_condition_count,
            product_condition_rate: dual.product_condition_rate,
            inverse_condition_rate: dual.inverse_condition_rate,
            eigen_check_passed: dual.eigen_check.passed,
            seed: dual.report.seed,
        }]),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "trials                  {}", dual.report.trials);
            let _ = writeln!(s, "literal-predicate wins  {}", dual.report.wins);
            let _ = writeln!(
                s,
                "a*b = 1 holds           {} ({})",
                dual.product_condition_count, dual.product_condition_rate
            );
            let _ = writeln!(
                s,
                "b = -a holds            {} ({})",
                dual.inverse_condition_count, dual.inverse_condition_rate
            );
            let _ = writeln!(s, "operator check          {}", eigen_line(&dual.eigen_check));
            Ok(s)
        }
    }
}

/// Runs a parsed configuration and renders its output.
pub fn execute(config: &CliConfig) -> Result<Output, CliError> {
    let mut warnings = Vec::new();
    let (body, ok) = match config.command {
        CommandName::Exact => {
            let rows = cmd_exact(config);
            let ok = rows.iter().all(|r| r.cross_check != CrossCheck::Mismatch);
            warnings.extend(
                rows.iter()
                    .filter_map(|r| r.warning.as_ref().map(|w| format!("n={}: {w}", r.n))),
            );
            (render_exact(&rows, config.format)?, ok)
        }
        CommandName::Run => (render_run(&cmd_run(config)?, config.format)?, true),
        CommandName::Enumerate => (render_enumerate(&cmd_enumerate(config), config.format)?, true),
        CommandName::Verify => {
            let checks = cmd_verify(config);
            let ok = checks.iter().all(|c| c.passed);
            (render_verify(&checks, config.format)?, ok)
        }
        CommandName::Game3Report => {
            let dual = cmd_game3_report(config)?;
            let ok = dual.eigen_check.passed;
            (render_game3(&dual, config.format)?, ok)
        }
    };
    Ok(Output { body, ok, warnings })
}

/// Full CLI entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return 1;
            }
            let _ = write!(stdout, "{text}");
            return 0;
        }
    };
    let result = CliConfig::from_cli(cli).and_then(|config| {
        let output = execute(&config)?;
        for w in &output.warnings {
            let _ = writeln!(stderr, "nlgames: warning: {w}");
        }
        match &config.output {
            Some(path) => std::fs::write(path, &output.body)?,
            None => stdout.write_all(output.body.as_bytes())?,
        }
        Ok(output.ok)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "nlgames: verification failed");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "nlgames: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> CliConfig {
        let argv = std::iter::once("nlgames").chain(args.iter().copied());
        CliConfig::from_cli(Cli::try_parse_from(argv).unwrap()).unwrap()
    }

    #[test]
    fn game3_forces_single_round() {
        let c = config(&["run", "--game", "3", "--rounds", "7"]);
        assert_eq!(c.rounds, 1);
        assert_eq!(c.spec(), GameSpec::game3());
    }

    #[test]
    fn exact_rows() {
        let rows = cmd_exact(&config(&["exact", "--game", "1", "--rounds", "2"]));
        let got: Vec<(usize, String)> = rows.iter().map(|r| (r.n, r.exact.to_string())).collect();
        assert_eq!(got, vec![(1, "1/2".to_string()), (2, "3/8".to_string())]);
        assert!(rows.iter().all(|r| r.cross_check == CrossCheck::Match));

        let rows = cmd_exact(&config(&["exact", "--game", "2", "--rounds", "5"]));
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.exact == ExactProb::half()));

        let rows = cmd_exact(&config(&["exact", "--game", "3"]));
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].exact, ExactProb::zero());
    }

    #[test]
    fn exact_beyond_cap_warns_but_keeps_closed_form() {
        let rows = cmd_exact(&config(&["exact", "--game", "2", "--rounds", "13"]));
        assert_eq!(rows.len(), 13);
        let last = rows.last().unwrap();
        assert_eq!(last.cross_check, CrossCheck::Skipped);
        assert!(last.warning.is_some());
        assert_eq!(last.exact, ExactProb::half());
    }

    #[test]
    fn enumerate_highlights_maxima() {
        let rows = cmd_enumerate(&config(&["enumerate", "--game", "3"]));
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.win_prob == ExactProb::zero() && r.is_max));

        let rows = cmd_enumerate(&config(&["enumerate", "--game", "2", "--rounds", "3"]));
        let all_plus = rows
            .iter()
            .find(|r| [r.alice_x, r.alice_xbar, r.bob_x, r.bob_xbar] == [Answer::Plus; 4])
            .unwrap();
        assert!(all_plus.is_max && all_plus.win_prob == ExactProb::one());

        let rows = cmd_enumerate(&config(&["enumerate", "--game", "1", "--rounds", "2"]));
        let opposite = rows
            .iter()
            .find(|r| {
                [r.alice_x, r.alice_xbar, r.bob_x, r.bob_xbar]
                    == [Answer::Plus, Answer::Plus, Answer::Minus, Answer::Minus]
            })
            .unwrap();
        assert!(opposite.is_max && opposite.win_prob == ExactProb::one());
    }

    #[test]
    fn usage_errors_exit_one() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(
            main_with_args(["nlgames", "run", "--trials", "0"], &mut out, &mut err),
            1
        );
        assert_eq!(main_with_args(["nlgames", "run", "--game", "4"], &mut out, &mut err), 1);
        assert_eq!(main_with_args(["nlgames", "bogus"], &mut out, &mut err), 1);
        assert_eq!(
            main_with_args(["nlgames", "verify", "--transcripts", "t.csv"], &mut out, &mut err),
            1
        );
        assert_eq!(main_with_args(["nlgames", "--help"], &mut out, &mut err), 0);
    }
}
