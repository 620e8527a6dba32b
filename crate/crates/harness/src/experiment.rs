use std::path::{Path, PathBuf};

use gaspp_core::learners::simulate;
use gaspp_core::{analyze, Algorithm, ConditionReport, Dynamics, Record, RunOptions, State, StepOutcome, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Prepared};
use crate::error::Result;
use crate::output::{trajectory_csv, write_atomic, write_json};
use crate::registry::BenchmarkGame;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub game: String,
    pub algorithms: Vec<Algorithm>,
    pub converged: bool,
    pub terminated: bool,
    pub iterations: usize,
    /// Reduced strategies.
    pub final_strategies: Vec<Vec<f64>>,
    pub final_exploitability: f64,
    pub final_gammas: Vec<f64>,
    pub last_step_norm: f64,
    pub gamma_shrinks: usize,
    /// Class tags; absent for games with more than two players.
    pub classification: Option<Vec<String>>,
    pub conditions: Vec<ConditionReport<f64>>,
    pub warnings: Vec<String>,
    /// Linearised dynamics at `gamma0` of the first learner, `2 x 2` games only.
    pub analysis: Option<Dynamics>,
    /// Predicted outcome from the initial point, `2 x 2` games only.
    pub prediction: Option<String>,
    pub trajectory: PathBuf,
}

/// Runs a prepared experiment, calling `observe` after every iteration.
pub fn execute<F>(prepared: &Prepared, opts: &RunOptions<f64>, observe: F) -> Result<Trajectory<f64>>
where
    F: FnMut(&Record, StepOutcome, &[State]),
{
    let t = match &prepared.game {
        BenchmarkGame::Bimatrix(g) => simulate(g, &prepared.learners, &prepared.initial, opts, observe)?,
        BenchmarkGame::Tensor(t) => simulate(t, &prepared.learners, &prepared.initial, opts, observe)?,
    };
    Ok(t)
}

pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

/// Builds the summary of a finished run.
pub fn summarize(prepared: &Prepared, trajectory: &Trajectory<f64>, csv: &Path) -> Summary {
    let s = &trajectory.summary;
    let bimatrix = prepared.game.as_bimatrix();
    let (analysis, prediction) = match bimatrix {
        Some(g) if g.rows() == 2 && g.cols() == 2 => match analyze(g, prepared.learners[0].sizes.gamma0) {
            Ok(d) => {
                let p = d.predict_outcome(prepared.initial[0].coords()[0], prepared.initial[1].coords()[0]);
                (Some(d), Some(p.to_string()))
            }
            Err(_) => (None, None),
        },
        _ => (None, None),
    };
    Summary {
        game: prepared.label.clone(),
        algorithms: prepared.learners.iter().map(|c| c.algorithm).collect(),
        converged: s.converged,
        terminated: s.terminated,
        iterations: s.iterations,
        final_strategies: s.final_strategies.clone(),
        final_exploitability: s.final_exploitability,
        final_gammas: s.final_gammas.clone(),
        last_step_norm: s.last_step_norm,
        gamma_shrinks: s.gamma_shrinks,
        classification: bimatrix.map(|g| g.classify().tags.iter().map(ToString::to_string).collect()),
        conditions: prepared.conditions.clone(),
        warnings: prepared.warnings.clone(),
        analysis,
        prediction,
        trajectory: csv.to_path_buf(),
    }
}

/// Writes the trajectory CSV and the summary JSON next to it.
pub fn write_artifacts(prepared: &Prepared, trajectory: &Trajectory<f64>, csv: &Path) -> Result<Summary> {
    write_atomic(csv, &trajectory_csv(&trajectory.records)?)?;
    let summary = summarize(prepared, trajectory, csv);
    write_json(&summary_path(csv), &summary)?;
    Ok(summary)
}

/// Validates, runs and writes one experiment under `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    let prepared = config.prepare()?;
    let opts = RunOptions::new(config.max_iters, config.tol_converge).with_stride(config.record_stride);
    let trajectory = execute(&prepared, &opts, |_, _, _| {})?;
    write_artifacts(&prepared, &trajectory, &config.output_path(out_dir))
}
