//! The `secgame` command line. [`run`] does all the work and returns what
//! should be printed, so it can be tested without spawning a process.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::candidates::EquilibriumType;
use crate::document::{
    equilibrium_to_json, game_to_json, mixed_strategy_to_json, optimization_to_json, parse_defender, parse_game,
    parse_intervals, parse_profile, parse_set_function, parse_set_function_game, projection_to_json,
    report_to_json, verdict_to_json,
};
use crate::error::{Error, Result};
use crate::generator::{generate_with_equilibrium, GeneratorRequest};
use crate::model::SecurityGame;
use crate::optimizer::{optimize_exhaustive, optimize_pseudopoly, PseudoOptions, DEFAULT_BUDGET};
use crate::oracle::verify_equilibrium;
use crate::projection::{approximation_report, nearest_additive, nearest_additive_game};
use crate::protective::{solve_protective_with_stats, solve_zero_sum_with_stats};
use crate::rational::{is_integral, parse as parse_numeral, sum, Rational};
use crate::realize::realize_marginals;
use crate::solver::solve_nash;

/// Environment variable capping exhaustive search sizes.
pub const BUDGET_ENV: &str = "SECGAME_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "secgame", version, about = "Exact equilibria, payoff optimization and additive projection for security games")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format; JSON is the stable contract.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for commands that draw random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pseudo,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a game document against every model invariant.
    Validate {
        game: PathBuf,
        /// Skip the distinct-parameters check.
        #[arg(long)]
        no_distinct: bool,
    },
    /// Compute an equilibrium.
    Solve {
        game: PathBuf,
        /// Use the sweep specialized to protective resources.
        #[arg(long, conflicts_with = "zero_sum")]
        protective: bool,
        /// Use the linear scan for zero-sum protective games.
        #[arg(long)]
        zero_sum: bool,
    },
    /// Check whether a marginal profile is an equilibrium.
    Verify { game: PathBuf, profile: PathBuf },
    /// Decompose a profile's marginals into mixed strategies over sets.
    Realize { profile: PathBuf },
    /// Choose attacker payoffs within intervals to maximize the defender's value.
    Optimize {
        /// Game document with defender payoffs (attacker payoffs optional).
        game: PathBuf,
        intervals: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Pseudo)]
        mode: Mode,
        /// Maximum number of choices for the exhaustive mode.
        #[arg(long)]
        budget: Option<u64>,
        /// Disable pruning in the pseudopolynomial mode.
        #[arg(long)]
        no_prune: bool,
        /// Integer scale for the subset-sum table (default: exact LCM).
        #[arg(long)]
        scale: Option<String>,
    },
    /// Nearest additive function of a set-function table, or nearest
    /// additive game of a set-function game.
    Project { input: PathBuf },
    /// Compare a set-function game with its nearest additive game.
    ApproxReport {
        input: PathBuf,
        /// Maximum support pairs for non-zero-sum originals.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Build a game whose equilibrium has the requested type.
    Generate {
        #[arg(long = "type")]
        ty: String,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long)]
        ka: usize,
        #[arg(long)]
        kd: usize,
        #[arg(long, default_value = "1")]
        c1: String,
        #[arg(long, default_value = "1")]
        c2: String,
        /// Also print the equilibrium.
        #[arg(long)]
        with_equilibrium: bool,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    /// 0 success, 1 negative result, 2 bad input, 3 internal failure.
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn failure(e: &Error) -> Self {
        let mut stderr = format!("error: {e}\n");
        if let Error::Invalid(report) = e {
            stderr = report.messages().iter().map(|m| format!("error: {m}\n")).collect();
        }
        CommandOutcome { code: e.exit_code(), stdout: String::new(), stderr }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return CommandOutcome { code, stdout, stderr };
        }
    };
    match execute(&cli) {
        Ok((code, doc)) => CommandOutcome { code, stdout: render(&doc, cli.common.format), stderr: String::new() },
        Err(e) => CommandOutcome::failure(&e),
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn env_budget() -> Result<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Precondition(format!("{BUDGET_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn numeral(text: &str, what: &str) -> Result<Rational> {
    parse_numeral(text).map_err(|e| Error::Document(format!("{what}: {e}")))
}

fn execute(cli: &Cli) -> Result<(i32, Value)> {
    match &cli.command {
        Command::Validate { game, no_distinct } => validate_cmd(&read(game)?, !no_distinct),
        Command::Solve { game, protective, zero_sum } => {
            let game = parse_game(&read(game)?, true)?;
            let (eq, cells) = if *protective {
                let (eq, stats) = solve_protective_with_stats(&game)?;
                (eq, Some(stats.cells))
            } else if *zero_sum {
                let (eq, stats) = solve_zero_sum_with_stats(&game)?;
                (eq, Some(stats.cells))
            } else {
                (solve_nash(&game)?, None)
            };
            let mut doc = equilibrium_to_json(&eq);
            if let Some(c) = cells {
                doc["cells_explored"] = json!(c);
            }
            Ok((0, doc))
        }
        Command::Verify { game, profile } => {
            let game = parse_game(&read(game)?, false)?;
            let profile = parse_profile(&read(profile)?)?;
            let verdict = verify_equilibrium(&game, &profile)?;
            Ok((if verdict.is_equilibrium { 0 } else { 1 }, verdict_to_json(&verdict)))
        }
        Command::Realize { profile } => {
            let p = parse_profile(&read(profile)?)?;
            let k = |v: &[Rational], what: &str| -> Result<usize> {
                let total = sum(v);
                if !is_integral(&total) || total < Rational::zero() {
                    return Err(Error::Precondition(format!("{what} marginals do not sum to a whole number of resources")));
                }
                usize::try_from(total.to_integer()).map_err(|_| Error::Precondition(format!("{what} sum too large")))
            };
            let attacker = realize_marginals(&p.alpha, k(&p.alpha, "attack")?)?;
            let defender = realize_marginals(&p.beta, k(&p.beta, "coverage")?)?;
            Ok((0, json!({"attacker": mixed_strategy_to_json(&attacker), "defender": mixed_strategy_to_json(&defender)})))
        }
        Command::Optimize { game, intervals, mode, budget, no_prune, scale } => {
            let (defender, k_a, k_d) = parse_defender(&read(game)?)?;
            let spec = parse_intervals(&read(intervals)?)?;
            let result = match mode {
                Mode::Exhaustive => {
                    let budget = match (budget, env_budget()?) {
                        (Some(b), Some(env)) => (*b).min(env),
                        (Some(b), None) => *b,
                        (None, Some(env)) => env,
                        (None, None) => DEFAULT_BUDGET,
                    };
                    optimize_exhaustive(&defender, k_a, k_d, &spec, budget)?
                }
                Mode::Pseudo => {
                    let scale = match scale {
                        Some(s) => Some(
                            s.trim()
                                .parse::<BigInt>()
                                .map_err(|_| Error::Document(format!("--scale must be an integer, got {s:?}")))?,
                        ),
                        None => None,
                    };
                    optimize_pseudopoly(&defender, k_a, k_d, &spec, &PseudoOptions { prune: !no_prune, scale })?
                }
            };
            Ok((0, optimization_to_json(&result)))
        }
        Command::Project { input } => {
            let text = read(input)?;
            let raw: Value = serde_json::from_str(&text)?;
            if raw.get("values").is_some() {
                Ok((0, projection_to_json(&nearest_additive(&parse_set_function(&text)?)?)))
            } else {
                let game = nearest_additive_game(&parse_set_function_game(&text)?)?;
                Ok((0, game_to_json(&game)))
            }
        }
        Command::ApproxReport { input, budget } => {
            let original = parse_set_function_game(&read(input)?)?;
            let projected = nearest_additive_game(&original)?;
            let env = env_budget()?.map(|b| usize::try_from(b).unwrap_or(usize::MAX));
            let budget = budget.or(env).unwrap_or(1 << 20);
            let report = approximation_report(&original, &projected, budget)?;
            let mut doc = report_to_json(&report);
            doc["projected_game"] = game_to_json(&projected);
            Ok((0, doc))
        }
        Command::Generate { ty, r, s, t, ka, kd, c1, c2, with_equilibrium } => {
            let req = GeneratorRequest {
                ty: ty.parse::<EquilibriumType>()?,
                r: *r,
                s: *s,
                t: *t,
                k_a: *ka,
                k_d: *kd,
                c1: numeral(c1, "--c1")?,
                c2: numeral(c2, "--c2")?,
                seed: cli.common.seed.unwrap_or(0),
            };
            let (game, eq) = generate_with_equilibrium(&req)?;
            let mut doc = game_to_json(&game);
            if *with_equilibrium {
                doc["equilibrium"] = equilibrium_to_json(&eq);
            }
            Ok((0, doc))
        }
    }
}

fn validate_cmd(text: &str, require_distinct: bool) -> Result<(i32, Value)> {
    match parse_game(text, require_distinct) {
        Ok(game) => Ok((0, validation_doc(&game))),
        Err(Error::Invalid(report)) => {
            let messages = report.messages();
            Ok((2, json!({"admissible": false, "violations": messages})))
        }
        Err(e) => Err(e),
    }
}

fn validation_doc(game: &SecurityGame) -> Value {
    json!({
        "admissible": true,
        "violations": Vec::<String>::new(),
        "m": game.m(),
        "k_a": game.k_a(),
        "k_d": game.k_d(),
        "fully_protective": game.is_fully_protective(),
        "zero_sum_protective": game.is_zero_sum_protective(),
    })
}

/// Renders a document as pretty JSON or as `key: value` lines.
fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Table => {
            let mut lines = Vec::new();
            flatten("", doc, &mut lines);
            let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            lines.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("-".into()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            let joined: Vec<String> = items.iter().filter_map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", joined.join(", "))));
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&(i + 1).to_string()), child, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_flattening() {
        let doc = json!({"a": "1/2", "b": {"c": [1, 2]}, "d": [{"x": true}]});
        let text = render(&doc, Format::Table);
        let rows: Vec<(&str, &str)> =
            text.lines().map(|l| l.split_once(' ').map(|(k, v)| (k, v.trim())).unwrap()).collect();
        assert_eq!(rows, [("a", "1/2"), ("b.c", "[1, 2]"), ("d.1.x", "true")]);
    }

    #[test]
    fn usage_errors_exit_2() {
        let out = run(["secgame", "solve"]);
        assert_eq!(out.code, 2);
        assert!(out.stdout.is_empty());
        assert_eq!(run(["secgame", "--help"]).code, 0);
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let out = run(["secgame", "solve", "/nonexistent/game.json"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("nonexistent"));
    }
}
