//! File outputs: trajectory and control CSVs, iteration-history JSONL,
//! and the run summary JSON. Reals are written with 17 significant digits.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use entroq::dynamics::Trajectory;
use entroq::objectives::Problem;
use entroq::qcore::{
    hs_distance, linear_entropy, partial_trace, purity, von_neumann_entropy, DensityMatrix, Qubit,
};

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fixed column order of the trajectory CSV.
pub const TRAJECTORY_HEADER: &str = "t,S,purity,linear_entropy,hs_rho0,hs_mixed,S_q1,S_q2,rz_q1,rz_q2";

/// The per-figure observables along a forward trajectory.
pub fn trajectory_csv(traj: &Trajectory, rho0: &DensityMatrix, stride: usize) -> String {
    let mixed = DensityMatrix::maximally_mixed();
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    let stride = stride.max(1);
    let last = traj.len() - 1;
    let mut i = 0;
    while i <= last {
        let rho = traj.density(i);
        let q1 = partial_trace(&rho, Qubit::One);
        let q2 = partial_trace(&rho, Qubit::Two);
        let row = [
            traj.node_time(i),
            von_neumann_entropy(&rho),
            purity(&rho),
            linear_entropy(&rho),
            hs_distance(&rho, rho0),
            hs_distance(&rho, &mixed),
            q1.entropy(),
            q2.entropy(),
            q1.bloch[2],
            q2.bloch[2],
        ];
        out.push_str(&row.map(fmt).join(","));
        out.push('\n');
        if i == last {
            break;
        }
        i = (i + stride).min(last);
    }
    out
}

/// One history record per optimizer iteration.
#[derive(Debug, Serialize)]
pub struct HistoryRecord<'a> {
    pub k: usize,
    pub kind: &'a str,
    pub value: f64,
    pub terminal_term: f64,
    pub integral_term: f64,
    pub reg_term: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub name: String,
    pub kind: String,
    pub final_objective: f64,
    pub iterations: usize,
    pub stopped_by: String,
    #[serde(rename = "S_final")]
    pub s_final: f64,
    #[serde(rename = "S_initial")]
    pub s_initial: f64,
    pub terminal_term: f64,
    pub integral_term: f64,
    pub reg_term: f64,
    pub horizon: f64,
}

pub fn write_string(dir: &Path, file: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(file);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(dir: &Path, file: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_string(dir, file, &(text + "\n"))
}

pub fn write_jsonl<T: Serialize>(dir: &Path, file: &str, rows: &[T]) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row)?);
        out.push('\n');
    }
    write_string(dir, file, &out)
}

/// Entropy trace of the final trajectory, reused by the summary.
pub fn final_entropies(problem: &Problem, traj: &Trajectory) -> (f64, f64) {
    let s_final = von_neumann_entropy(&traj.density(traj.len() - 1));
    (problem.s_initial(), s_final)
}
