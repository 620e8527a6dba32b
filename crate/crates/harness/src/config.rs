//! Experiment configuration documents.
//!
//! ```json
//! {
//!   "game": "shapleys_game",
//!   "learners": [{ "algorithm": "gaspp", "eta": 0.001, "gamma0": 3.0 }],
//!   "initial": [[0.1, 0.8], [0.8, 0.1]],
//!   "max_iters": 1000000,
//!   "allow_condition_override": true,
//!   "output": "shapley/gaspp.csv"
//! }
//! ```
//!
//! `game` is a registry name or an inline `{"R": [[...]], "C": [[...]]}`.
//! A single learner entry applies to every player. Strategies are reduced:
//! the probabilities of all actions but the last. Unknown keys are errors.

use std::path::{Path, PathBuf};

use gaspp_core::learners::validate_conditions_for_ranges;
use gaspp_core::{Algorithm, ConditionReport, Config, Game, StepSizes, Strategy};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::registry::{self, BenchmarkGame};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GameSpec {
    Named(String),
    Inline(Game),
}

impl<'de> Deserialize<'de> for GameSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;

        impl<'de> serde::de::Visitor<'de> for Visitor {
            type Value = GameSpec;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a registry game name or an object with keys R and C")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<GameSpec, E> {
                Ok(GameSpec::Named(v.to_string()))
            }

            fn visit_map<A: serde::de::MapAccess<'de>>(self, map: A) -> std::result::Result<GameSpec, A::Error> {
                Game::deserialize(serde::de::value::MapAccessDeserializer::new(map)).map(GameSpec::Inline)
            }
        }

        de.deserialize_any(Visitor)
    }
}

impl GameSpec {
    pub fn label(&self) -> String {
        match self {
            GameSpec::Named(n) => n.clone(),
            GameSpec::Inline(g) => format!("inline_{}x{}", g.rows(), g.cols()),
        }
    }

    pub fn resolve(&self) -> Result<BenchmarkGame> {
        match self {
            GameSpec::Named(n) => Ok(registry::entry(n)?.game),
            GameSpec::Inline(g) => Ok(BenchmarkGame::Bimatrix(g.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub algorithm: Algorithm,
    pub eta: f64,
    pub gamma0: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
}

impl LearnerSpec {
    pub fn config(&self) -> Config {
        Config {
            algorithm: self.algorithm,
            sizes: StepSizes {
                eta: self.eta,
                gamma0: self.gamma0,
                mu: self.mu,
            },
        }
    }
}

fn default_mu() -> f64 {
    0.5
}

fn default_learners() -> Vec<LearnerSpec> {
    vec![LearnerSpec {
        algorithm: Algorithm::GaSpp,
        eta: 0.001,
        gamma0: 0.1,
        mu: default_mu(),
    }]
}

fn default_max_iters() -> usize {
    1_000_000
}

fn default_tol() -> f64 {
    1e-10
}

fn default_stride() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    #[serde(default = "default_learners")]
    pub learners: Vec<LearnerSpec>,
    /// Uniform strategies when omitted.
    #[serde(default)]
    pub initial: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol_converge: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub allow_condition_override: bool,
    /// Trajectory CSV path; relative paths resolve against the output
    /// directory. Defaults to `<game>.csv`.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A config checked against its game and ready to run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub label: String,
    pub game: BenchmarkGame,
    pub learners: Vec<Config>,
    pub initial: Vec<Strategy>,
    pub conditions: Vec<ConditionReport<f64>>,
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    pub fn new(game: GameSpec) -> Self {
        Self {
            game,
            learners: default_learners(),
            initial: None,
            max_iters: default_max_iters(),
            tol_converge: default_tol(),
            record_stride: default_stride(),
            allow_condition_override: false,
            output: None,
        }
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        config.prepare()?;
        Ok(config)
    }

    /// Validates the config and resolves its game, learners and start point.
    pub fn prepare(&self) -> Result<Prepared> {
        let game = self.game.resolve()?;
        let players = game.num_players();

        if self.max_iters == 0 {
            return Err(HarnessError::validation("max_iters", "must be positive"));
        }
        if !(self.tol_converge.is_finite() && self.tol_converge > 0.0) {
            return Err(HarnessError::validation("tol_converge", "must be a positive number"));
        }
        if self.record_stride == 0 {
            return Err(HarnessError::validation("record_stride", "must be positive"));
        }

        let specs: Vec<&LearnerSpec> = match self.learners.len() {
            1 => vec![&self.learners[0]; players],
            n if n == players => self.learners.iter().collect(),
            n => {
                return Err(HarnessError::validation(
                    "learners",
                    format!("expected 1 or {players} entries, got {n}"),
                ))
            }
        };

        let ranges = game.reward_ranges();
        let mut learners = Vec::with_capacity(players);
        let mut conditions = Vec::with_capacity(players);
        let mut warnings = Vec::new();
        for (i, spec) in specs.iter().enumerate() {
            let field = |name: &str| {
                if self.learners.len() == 1 {
                    format!("learners[0].{name}")
                } else {
                    format!("learners[{i}].{name}")
                }
            };
            for (name, value) in [("eta", spec.eta), ("gamma0", spec.gamma0), ("mu", spec.mu)] {
                if !value.is_finite() {
                    return Err(HarnessError::validation(field(name), "must be finite"));
                }
            }
            if !(spec.mu > 0.0 && spec.mu < 1.0) {
                return Err(HarnessError::validation(
                    field("mu"),
                    "must lie strictly between 0 and 1",
                ));
            }
            let report = validate_conditions_for_ranges(
                &ranges,
                &StepSizes {
                    eta: spec.eta,
                    gamma0: spec.gamma0,
                    mu: spec.mu,
                },
            );
            if !report.condition1 {
                let name = if spec.eta <= 0.0 { "eta" } else { "gamma0" };
                return Err(HarnessError::validation(
                    field(name),
                    "condition 1 fails: step sizes must be positive",
                ));
            }
            if !(report.condition2 && report.condition3) && (self.learners.len() > 1 || i == 0) {
                let message = format!(
                    "learner {i}: condition 2 {} (4 gamma0^2 delta_r delta_c = {:.6}), condition 3 {} (eta, gamma0 < {:.6})",
                    pass_word(report.condition2),
                    report.condition2_value,
                    pass_word(report.condition3),
                    report.condition3_bound
                );
                if !self.allow_condition_override {
                    return Err(HarnessError::validation(
                        field("gamma0"),
                        format!("{message}; set allow_condition_override to run anyway"),
                    ));
                }
                log::warn!("step-size conditions overridden: {message}");
                warnings.push(message);
            }
            learners.push(spec.config());
            conditions.push(report);
        }

        let initial = match &self.initial {
            None => (0..players)
                .map(|p| Strategy::uniform(game.num_actions(p)))
                .collect::<gaspp_core::Result<Vec<_>>>()?,
            Some(points) => {
                if points.len() != players {
                    return Err(HarnessError::validation(
                        "initial",
                        format!("expected {players} strategies, got {}", points.len()),
                    ));
                }
                points
                    .iter()
                    .enumerate()
                    .map(|(p, x)| {
                        let dim = game.num_actions(p) - 1;
                        if x.len() != dim {
                            return Err(HarnessError::validation(
                                format!("initial[{p}]"),
                                format!("expected {dim} reduced coordinates, got {}", x.len()),
                            ));
                        }
                        Strategy::new(x.clone())
                            .map_err(|e| HarnessError::validation(format!("initial[{p}]"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };

        Ok(Prepared {
            label: self.game.label(),
            game,
            learners,
            initial,
            conditions,
            warnings,
        })
    }

    pub fn output_path(&self, out_dir: &Path) -> PathBuf {
        let file = self
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.game.label())));
        if file.is_absolute() {
            file
        } else {
            out_dir.join(file)
        }
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "passes"
    } else {
        "fails"
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    ExperimentConfig::from_json(&text, path)
}
