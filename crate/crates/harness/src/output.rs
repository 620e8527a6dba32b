//! Trajectory CSV and summary JSON files.
//!
//! The CSV has one row per iteration, agent and action:
//! `k,agent,coord_index,prob,pred_prob,grad,gamma_k`. `prob` runs over the
//! full probability vector, so the last action's probability is included.
//! `pred_prob` is the projected forecast of that agent (empty when no agent
//! forecasts, and on the final row block). `grad` is the reduced gradient
//! component and is empty for the last action. Numbers carry 17 significant
//! digits, which round-trips every `f64` exactly.

use std::io::Write;
use std::path::Path;

use gaspp_core::geometry::full_strategy;
use gaspp_core::Record;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const CSV_HEADER: [&str; 7] = ["k", "agent", "coord_index", "prob", "pred_prob", "grad", "gamma_k"];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(records: &[Record]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for rec in records {
        for (agent, reduced) in rec.strategies.iter().enumerate() {
            let full = full_strategy(reduced);
            let pred = rec.predictions.as_ref().map(|p| full_strategy(&p[agent]));
            for (i, &prob) in full.iter().enumerate() {
                w.write_record([
                    rec.k.to_string(),
                    agent.to_string(),
                    i.to_string(),
                    num(prob),
                    pred.as_ref().map_or_else(String::new, |p| num(p[i])),
                    rec.gradients[agent].get(i).map_or_else(String::new, |&g| num(g)),
                    num(rec.gamma_k[agent]),
                ])?;
            }
        }
    }
    w.into_inner()
        .map_err(|e| HarnessError::io("<csv buffer>", e.into_error()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub k: usize,
    pub agent: usize,
    pub coord_index: usize,
    pub prob: f64,
    pub pred_prob: Option<f64>,
    pub grad: Option<f64>,
    pub gamma_k: f64,
}

pub fn read_trajectory(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

/// Reduced strategies per recorded iteration, rebuilt from CSV rows.
pub fn strategies_by_iteration(rows: &[CsvRow]) -> Vec<(usize, Vec<Vec<f64>>)> {
    let mut out: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
    for row in rows {
        if out.last().is_none_or(|(k, _)| *k != row.k) {
            out.push((row.k, Vec::new()));
        }
        let agents = &mut out.last_mut().expect("just pushed").1;
        if agents.len() <= row.agent {
            agents.resize(row.agent + 1, Vec::new());
        }
        agents[row.agent].push(row.prob);
    }
    for (_, agents) in &mut out {
        for full in agents.iter_mut() {
            full.pop();
        }
    }
    out
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| HarnessError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| HarnessError::io(path, e.into()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
