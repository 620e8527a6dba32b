//! Reference experiment suites with their pass/fail expectations.

use std::collections::VecDeque;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gaspp_core::geometry::full_strategy;
use gaspp_core::{Algorithm, RunOptions};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, GameSpec, LearnerSpec};
use crate::error::{HarnessError, Result};
use crate::experiment::{execute, write_artifacts, Summary};
use crate::output::write_json;

/// Iterations over which the oscillation amplitude is measured.
pub const AMPLITUDE_WINDOW: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Fig2, Suite::Fig3, Suite::Fig4, Suite::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fig2 => "fig2",
            Suite::Fig3 => "fig3",
            Suite::Fig4 => "fig4",
            Suite::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            HarnessError::validation(
                "suite",
                format!("unknown suite `{s}`, expected fig2, fig3, fig4 or fig5"),
            )
        })
    }
}

/// One configured sub-run of a suite.
#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub config: ExperimentConfig,
    pub measure_amplitude: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub label: String,
    pub summary: Summary,
    /// Largest range of any action probability over the final iterations.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub runs: Vec<CaseResult>,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn run(&self, label: &str) -> Option<&CaseResult> {
        self.runs.iter().find(|r| r.label == label)
    }

    pub fn table(&self) -> String {
        let mut out = format!("{} ({})\n", self.suite, if self.passed() { "pass" } else { "FAIL" });
        for r in &self.runs {
            out += &format!(
                "  {:<36} iterations {:>8}  converged {:<5}  exploitability {:.3e}{}\n",
                r.label,
                r.summary.iterations,
                r.summary.converged,
                r.summary.final_exploitability,
                r.amplitude.map_or_else(String::new, |a| format!("  amplitude {a:.4}")),
            );
        }
        for c in &self.checks {
            out += &format!(
                "  [{}] {}: {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.description,
                c.observed
            );
        }
        out
    }
}

fn learner(algorithm: Algorithm, eta: f64, gamma0: f64) -> Vec<LearnerSpec> {
    vec![LearnerSpec {
        algorithm,
        eta,
        gamma0,
        mu: 0.5,
    }]
}

fn case(label: String, game: &str, learners: Vec<LearnerSpec>, initial: Vec<Vec<f64>>, stride: usize) -> Case {
    let mut config = ExperimentConfig::new(GameSpec::Named(game.to_string()));
    config.learners = learners;
    config.initial = Some(initial);
    config.record_stride = stride;
    config.allow_condition_override = true;
    Case {
        label,
        config,
        measure_amplitude: false,
    }
}

fn algorithm_tag(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Ga => "ga",
        Algorithm::GaSpp => "gaspp",
        Algorithm::IgaPp => "igapp",
        Algorithm::GigaWolf => "gigawolf",
    }
}

/// The sub-runs of a suite, before any iteration cap is applied.
pub fn cases(suite: Suite) -> Vec<Case> {
    match suite {
        Suite::Fig2 => {
            let mut out = Vec::new();
            for game in ["prisoners_dilemma", "chicken", "battle_of_sexes", "rock_paper_scissors"] {
                let starts: [Vec<Vec<f64>>; 2] = if game == "rock_paper_scissors" {
                    [
                        vec![vec![0.7, 0.3], vec![0.3, 0.7]],
                        vec![vec![0.3, 0.7], vec![0.7, 0.3]],
                    ]
                } else {
                    [vec![vec![0.7], vec![0.3]], vec![vec![0.3], vec![0.7]]]
                };
                for (i, start) in starts.into_iter().enumerate() {
                    out.push(case(
                        format!("{game}_start{}", i + 1),
                        game,
                        learner(Algorithm::GaSpp, 0.001, 0.1),
                        start,
                        10,
                    ));
                }
            }
            out
        }
        Suite::Fig3 => [Algorithm::GaSpp, Algorithm::GigaWolf, Algorithm::IgaPp]
            .into_iter()
            .map(|a| {
                let mut c = case(
                    format!("shapleys_game_{}", algorithm_tag(a)),
                    "shapleys_game",
                    learner(a, 0.001, 3.0),
                    vec![vec![0.1, 0.8], vec![0.8, 0.1]],
                    1000,
                );
                c.measure_amplitude = true;
                c
            })
            .collect(),
        Suite::Fig4 => {
            let mut out = Vec::new();
            for gamma in [0.01, 0.1] {
                for a in [Algorithm::GaSpp, Algorithm::IgaPp] {
                    out.push(case(
                        format!("two_by_three_{}_gamma{gamma}", algorithm_tag(a)),
                        "two_by_three",
                        learner(a, 0.001, gamma),
                        vec![vec![0.8], vec![0.1, 0.8]],
                        1000,
                    ));
                }
            }
            out
        }
        Suite::Fig5 => {
            let mut c = case(
                "three_player_matching_pennies_gaspp".to_string(),
                "three_player_matching_pennies",
                learner(Algorithm::GaSpp, 0.001, 0.3),
                vec![vec![0.1], vec![0.4], vec![0.7]],
                1000,
            );
            c.config.tol_converge = 1e-6;
            vec![c]
        }
    }
}

fn run_case(case: &Case, dir: &Path) -> Result<CaseResult> {
    let prepared = case.config.prepare()?;
    let opts = RunOptions::new(case.config.max_iters, case.config.tol_converge).with_stride(case.config.record_stride);
    let mut recent: VecDeque<Vec<f64>> = VecDeque::new();
    let trajectory = execute(&prepared, &opts, |_, _, states| {
        if case.measure_amplitude {
            if recent.len() == AMPLITUDE_WINDOW {
                recent.pop_front();
            }
            recent.push_back(states.iter().flat_map(|s| full_strategy(s.strategy.coords())).collect());
        }
    })?;
    let amplitude = case.measure_amplitude.then(|| amplitude(&recent));
    let summary = write_artifacts(&prepared, &trajectory, &dir.join(format!("{}.csv", case.label)))?;
    Ok(CaseResult {
        label: case.label.clone(),
        summary,
        amplitude,
    })
}

fn amplitude(states: &VecDeque<Vec<f64>>) -> f64 {
    let Some(first) = states.front() else {
        return 0.0;
    };
    (0..first.len())
        .map(|i| {
            let (lo, hi) = states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s[i]), hi.max(s[i]))
            });
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn checks(suite: Suite, runs: &[CaseResult]) -> Vec<Check> {
    let get = |label: &str| runs.iter().find(|r| r.label == label).expect("suite run present");
    match suite {
        Suite::Fig2 => runs
            .iter()
            .map(|r| {
                let s = &r.summary;
                let mut pass = s.converged && s.final_exploitability <= 1e-4;
                let mut observed = format!(
                    "converged {}, exploitability {}",
                    s.converged,
                    sci(s.final_exploitability)
                );
                if r.label.starts_with("rock_paper_scissors") {
                    let dev = s
                        .final_strategies
                        .iter()
                        .flat_map(|x| full_strategy(x))
                        .fold(0.0f64, |m, p| m.max((p - 1.0 / 3.0).abs()));
                    pass &= dev <= 1e-3;
                    observed += &format!(", distance to uniform {}", sci(dev));
                }
                Check {
                    description: format!("{} converges to an equilibrium", r.label),
                    observed,
                    pass,
                }
            })
            .collect(),
        Suite::Fig3 => {
            let mut out: Vec<Check> = ["gaspp", "igapp"]
                .iter()
                .map(|tag| {
                    let r = get(&format!("shapleys_game_{tag}"));
                    Check {
                        description: format!("{} reaches exploitability <= 1e-2", r.label),
                        observed: sci(r.summary.final_exploitability),
                        pass: r.summary.final_exploitability <= 1e-2,
                    }
                })
                .collect();
            let wolf = get("shapleys_game_gigawolf");
            let amp = wolf.amplitude.unwrap_or(0.0);
            out.push(Check {
                description: "GIGA-WoLF keeps oscillating (amplitude > 0.05 over the last 1e5 iterations)".into(),
                observed: format!("amplitude {amp:.4}, converged {}", wolf.summary.converged),
                pass: amp > 0.05 && !wolf.summary.converged,
            });
            out
        }
        Suite::Fig4 => {
            let mut out = Vec::new();
            let mut observed = Vec::new();
            for gamma in [0.01, 0.1] {
                let r = get(&format!("two_by_three_gaspp_gamma{gamma}"));
                out.push(Check {
                    description: format!("{} reaches exploitability <= 1e-4", r.label),
                    observed: sci(r.summary.final_exploitability),
                    pass: r.summary.final_exploitability <= 1e-4,
                });
                let i = get(&format!("two_by_three_igapp_gamma{gamma}"));
                observed.push(format!(
                    "gamma {gamma}: converged {}, exploitability {}",
                    i.summary.converged,
                    sci(i.summary.final_exploitability)
                ));
            }
            let igapp_stalls = [0.01, 0.1].iter().any(|gamma| {
                let s = &get(&format!("two_by_three_igapp_gamma{gamma}")).summary;
                s.converged && s.final_exploitability > 1e-3
            });
            out.push(Check {
                description: "IGA-PP converges to a non-equilibrium point for some gamma".into(),
                observed: observed.join("; "),
                pass: igapp_stalls,
            });
            out
        }
        Suite::Fig5 => {
            let r = &runs[0];
            vec![Check {
                description: "three-player GA-SPP does not converge".into(),
                observed: format!(
                    "converged {} after {} iterations (terminated {}), exploitability {}",
                    r.summary.converged,
                    r.summary.iterations,
                    r.summary.terminated,
                    sci(r.summary.final_exploitability)
                ),
                pass: !r.summary.converged,
            }]
        }
    }
}

/// Runs every sub-run of `suite` in parallel and writes the CSVs, summaries
/// and `report.json` under `out_dir/<suite>/`.
pub fn reproduce(suite: Suite, out_dir: &Path, max_iters: Option<usize>) -> Result<SuiteReport> {
    let dir: PathBuf = out_dir.join(suite.name());
    let mut cases = cases(suite);
    if let Some(n) = max_iters {
        cases.iter_mut().for_each(|c| c.config.max_iters = n);
    }
    let results: Vec<Result<CaseResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cases.iter().map(|c| scope.spawn(|| run_case(c, &dir))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sub-run thread panicked"))
            .collect()
    });
    let runs = results
        .into_iter()
        .zip(&cases)
        .map(|(r, c)| r.map_err(|e| e.context(format!("{suite} run {}", c.label))))
        .collect::<Result<Vec<_>>>()?;
    let report = SuiteReport {
        suite,
        checks: checks(suite, &runs),
        runs,
    };
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}
