//! Re-shape a run directory into per-figure CSV bundles.

use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::output::write_string;

fn select_columns(csv: &str, wanted: &[&str]) -> Result<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines
        .next()
        .context("empty CSV")?
        .split(',')
        .collect();
    let indices: Vec<usize> = wanted
        .iter()
        .map(|w| {
            header
                .iter()
                .position(|h| h == w)
                .with_context(|| format!("column `{w}` missing"))
        })
        .collect::<Result<_>>()?;
    let mut out = wanted.join(",");
    out.push('\n');
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let row: Vec<&str> = indices.iter().map(|&i| fields[i]).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Emit `figures/` inside a run directory: entropy/purity traces, qubit
/// reductions, controls, and the convergence history.
pub fn export_figures(run_dir: &Path) -> Result<()> {
    if !run_dir.is_dir() {
        bail!("{} is not a directory", run_dir.display());
    }
    let figures = run_dir.join("figures");

    let trajectory = run_dir.join("trajectory.csv");
    if trajectory.exists() {
        let csv = std::fs::read_to_string(&trajectory)?;
        write_string(
            &figures,
            "entropy.csv",
            &select_columns(&csv, &["t", "S", "purity", "linear_entropy", "hs_rho0", "hs_mixed"])?,
        )?;
        write_string(
            &figures,
            "qubits.csv",
            &select_columns(&csv, &["t", "S_q1", "S_q2", "rz_q1", "rz_q2"])?,
        )?;
    }

    let controls = run_dir.join("controls.csv");
    if controls.exists() {
        std::fs::copy(&controls, figures.join("controls.csv")).or_else(|_| {
            std::fs::create_dir_all(&figures)?;
            std::fs::copy(&controls, figures.join("controls.csv"))
        })?;
    }

    let history = run_dir.join("history.jsonl");
    if history.exists() {
        let text = std::fs::read_to_string(&history)?;
        let mut out = String::from("k,value,terminal_term,integral_term,reg_term,residual\n");
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let v: serde_json::Value = serde_json::from_str(line)?;
            let get = |key: &str| -> String {
                match v.get(key) {
                    Some(serde_json::Value::Number(n)) => n.to_string(),
                    _ => String::from("nan"),
                }
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                get("k"),
                get("value"),
                get("terminal_term"),
                get("integral_term"),
                get("reg_term"),
                get("residual"),
            ));
        }
        write_string(&figures, "convergence.csv", &out)?;
    }

    if !trajectory.exists() && !controls.exists() && !history.exists() {
        bail!(
            "{} contains none of trajectory.csv, controls.csv, history.jsonl",
            run_dir.display()
        );
    }
    println!("wrote figure bundles under {}", figures.display());
    Ok(())
}
