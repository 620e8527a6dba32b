use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gaspp_core::equilibrium::pure_equilibria;
use gaspp_core::geometry::full_strategy;
use gaspp_core::learners::validate_conditions_for_ranges;
use gaspp_core::{analyze, enumerate_ne, Game, StepSizes};

use crate::config::load_config;
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, summary_path};
use crate::registry::{self, BenchmarkGame};
use crate::reproduce::{reproduce, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "gaspp",
    version,
    about = "Learning dynamics with shrinking policy prediction"
)]
pub struct Cli {
    /// Directory for trajectories and summaries.
    #[arg(long, global = true, env = "GASPP_OUT_DIR", default_value = "gaspp-out")]
    pub out_dir: PathBuf,
    /// Cap on iterations per run, overriding configs and suites.
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// Only print errors and final verdicts.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment described by a JSON config.
    Run { config: PathBuf },
    /// Re-run a reference experiment suite and check its expected outcome.
    Reproduce { suite: SuiteArg },
    /// Print the structural classes of a game.
    Classify {
        /// Registry name or path to a JSON file with keys R and C.
        game: String,
    },
    /// Enumerate Nash equilibria.
    Ne { game: String },
    /// Linearised GA-SPP dynamics of a 2x2 game.
    #[command(name = "analyze2x2")]
    Analyze2x2 {
        game: String,
        #[arg(long)]
        gamma: f64,
        /// Starting point for an outcome prediction.
        #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"])]
        from: Option<Vec<f64>>,
    },
    /// Check the step-size conditions.
    CheckConditions {
        game: String,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        gamma0: f64,
    },
}

/// Resolves a registry name or a JSON payoff file.
pub fn resolve_game(arg: &str) -> Result<BenchmarkGame> {
    if registry::NAMES.contains(&arg) {
        return Ok(registry::entry(arg)?.game);
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(HarnessError::UnknownGame(arg.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let game: Game = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(BenchmarkGame::Bimatrix(game))
}

fn two_player(game: BenchmarkGame, what: &str) -> Result<Game> {
    match game {
        BenchmarkGame::Bimatrix(g) => Ok(g),
        BenchmarkGame::Tensor(_) => Err(HarnessError::Unsupported(format!("{what} needs a two-player game"))),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn io(e: std::io::Error) -> HarnessError {
    HarnessError::io("<stdout>", e)
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Run { config } => {
            let mut cfg = load_config(config)?;
            if let Some(n) = cli.max_iters {
                cfg.max_iters = n;
            }
            let summary = run_experiment(&cfg, &cli.out_dir)?;
            if !cli.quiet {
                for w in &summary.warnings {
                    writeln!(out, "warning: {w}").map_err(io)?;
                }
            }
            writeln!(
                out,
                "{}: converged {} after {} iterations, exploitability {:.3e}",
                summary.game, summary.converged, summary.iterations, summary.final_exploitability
            )
            .map_err(io)?;
            if !cli.quiet {
                writeln!(out, "trajectory: {}", summary.trajectory.display()).map_err(io)?;
                writeln!(out, "summary: {}", summary_path(&summary.trajectory).display()).map_err(io)?;
            }
            Ok(0)
        }
        Command::Reproduce { suite } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Fig2 => vec![Suite::Fig2],
                SuiteArg::Fig3 => vec![Suite::Fig3],
                SuiteArg::Fig4 => vec![Suite::Fig4],
                SuiteArg::Fig5 => vec![Suite::Fig5],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let mut ok = true;
            for s in suites {
                let report = reproduce(s, &cli.out_dir, cli.max_iters)?;
                ok &= report.passed();
                if cli.quiet {
                    writeln!(out, "{}: {}", s, if report.passed() { "pass" } else { "FAIL" }).map_err(io)?;
                } else {
                    write!(out, "{}", report.table()).map_err(io)?;
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Classify { game } => {
            let g = two_player(resolve_game(game)?, "classification")?;
            let tags: Vec<String> = g.classify().tags.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", tags.join(", ")).map_err(io)?;
            Ok(0)
        }
        Command::Ne { game } => {
            match resolve_game(game)? {
                BenchmarkGame::Bimatrix(g) => {
                    let found = enumerate_ne(&g)?;
                    writeln!(out, "{} equilibria", found.equilibria.len()).map_err(io)?;
                    for ne in &found.equilibria {
                        writeln!(
                            out,
                            "row {} column {}",
                            fmt_vec(&full_strategy(ne.alpha.coords())),
                            fmt_vec(&full_strategy(ne.beta.coords()))
                        )
                        .map_err(io)?;
                    }
                    if found.singular_supports > 0 {
                        writeln!(
                            out,
                            "note: {} support pairs have singular indifference systems and were skipped",
                            found.singular_supports
                        )
                        .map_err(io)?;
                    }
                }
                BenchmarkGame::Tensor(t) => {
                    let pure = pure_equilibria(&t, 1e-12)?;
                    writeln!(
                        out,
                        "{} pure equilibria (mixed equilibria are not enumerated for more than two players)",
                        pure.len()
                    )
                    .map_err(io)?;
                    for p in pure {
                        writeln!(out, "actions {p:?}").map_err(io)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Analyze2x2 { game, gamma, from } => {
            let g = two_player(resolve_game(game)?, "2x2 analysis")?;
            let d = analyze(&g, *gamma)?;
            let p = d.params;
            writeln!(out, "u_r {} b_r {} u_c {} b_c {}", p.u_r, p.b_r, p.u_c, p.b_c).map_err(io)?;
            writeln!(
                out,
                "U [[{}, {}], [{}, {}]]",
                d.u[0][0], d.u[0][1], d.u[1][0], d.u[1][1]
            )
            .map_err(io)?;
            for (i, l) in d.eigenvalues.iter().enumerate() {
                writeln!(out, "lambda{} {} {:+}i", i + 1, l.re, l.im).map_err(io)?;
            }
            match d.center {
                Some((a, b)) => writeln!(out, "center ({a}, {b})").map_err(io)?,
                None => writeln!(out, "center none").map_err(io)?,
            }
            writeln!(out, "case {:?}", d.case).map_err(io)?;
            if let Some(start) = from {
                writeln!(out, "prediction {}", d.predict_outcome(start[0], start[1])).map_err(io)?;
            }
            Ok(0)
        }
        Command::CheckConditions { game, eta, gamma0 } => {
            let g = resolve_game(game)?;
            let r = validate_conditions_for_ranges(&g.reward_ranges(), &StepSizes::new(*eta, *gamma0));
            let word = |ok: bool| if ok { "pass" } else { "FAIL" };
            writeln!(out, "condition 1 (eta, gamma0 > 0): {}", word(r.condition1)).map_err(io)?;
            writeln!(
                out,
                "condition 2 (4 gamma0^2 delta_r delta_c = {} < 1): {}",
                r.condition2_value,
                word(r.condition2)
            )
            .map_err(io)?;
            writeln!(
                out,
                "condition 3 (eta, gamma0 < {}): {}",
                r.condition3_bound,
                word(r.condition3)
            )
            .map_err(io)?;
            Ok(if r.all_pass() { 0 } else { 1 })
        }
    }
}
