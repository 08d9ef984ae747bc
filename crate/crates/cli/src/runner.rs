//! Execute a resolved scenario and write its outputs.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use entroq::controls::ControlSet;
use entroq::dynamics::solve_forward;
use entroq::objectives::{evaluate, genome_fitness, ObjectiveTerms};
use entroq::optim::{ga_minimize, gpm1, gpm2, GaConfig, StopReason};

use crate::output::{
    final_entropies, trajectory_csv, write_jsonl, write_json, write_string, HistoryRecord, Summary,
};
use crate::scenario::{ResolvedOptimizer, ResolvedScenario};

/// Command-line overrides applied on top of the scenario file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub max_iters: Option<usize>,
    pub trials: Option<usize>,
    pub parallel: bool,
    pub out_root: Option<PathBuf>,
}

/// Exit status of a run: criterion met, budget exhausted, or error.
pub enum RunStatus {
    Converged,
    BudgetExhausted,
}

pub struct RunOutcome {
    pub status: RunStatus,
    pub summary_path: PathBuf,
}

fn stride_for(len: usize) -> usize {
    // keep trajectory CSVs near 2000 rows
    (len / 2000).max(1)
}

pub fn run(mut resolved: ResolvedScenario, overrides: &Overrides) -> Result<RunOutcome> {
    if let Some(steps) = overrides.steps {
        resolved.problem.steps = steps.max(resolved.initial.subintervals());
    }
    let out_dir = match &overrides.out_root {
        Some(root) => root.join(&resolved.scenario.output.directory),
        None => match std::env::var_os("ENTROQ_OUTPUT_ROOT") {
            Some(root) => PathBuf::from(root).join(&resolved.scenario.output.directory),
            None => PathBuf::from(&resolved.scenario.output.directory),
        },
    };
    let kind = resolved.problem.objective.kind().as_str();
    let name = resolved.scenario.name.clone();

    let (control, terms, iterations, stopped_by, history): (
        ControlSet,
        ObjectiveTerms,
        usize,
        String,
        Vec<HistoryRecord>,
    ) = match &resolved.optimizer {
        ResolvedOptimizer::Gpm1(cfg) | ResolvedOptimizer::Gpm2(cfg) => {
            let mut cfg = *cfg;
            if let Some(n) = overrides.max_iters {
                cfg.max_iters = n;
            }
            let two_step = matches!(resolved.optimizer, ResolvedOptimizer::Gpm2(_));
            let result = if two_step {
                gpm2(&resolved.problem, resolved.initial.clone(), &cfg)?
            } else {
                gpm1(&resolved.problem, resolved.initial.clone(), &cfg)?
            };
            let history = result
                .history
                .iter()
                .map(|r| HistoryRecord {
                    k: r.k,
                    kind,
                    value: r.value,
                    terminal_term: r.terminal,
                    integral_term: r.integral,
                    reg_term: r.reg,
                    residual: Some(r.residual),
                    wall_ms: Some(r.wall_ms),
                })
                .collect();
            let stopped_by = match result.stop {
                StopReason::CriterionMet => "criterion",
                StopReason::IterationBudget => "iteration-budget",
            };
            (
                result.control,
                result.terms,
                result.iterations,
                stopped_by.to_string(),
                history,
            )
        }
        ResolvedOptimizer::Ga(cfg) => {
            let mut cfg = GaConfig {
                parallel_trials: overrides.parallel,
                ..*cfg
            };
            if let Some(n) = overrides.max_iters {
                cfg.max_iters = n;
            }
            if let Some(s) = overrides.seed {
                cfg.seed = s;
            }
            if let Some(t) = overrides.trials {
                cfg.trials = t;
            }
            let layout = resolved
                .layout
                .expect("GA scenarios always carry a genome layout");
            let problem = &resolved.problem;
            let fitness = genome_fitness(problem, &layout, resolved.bounds);
            let (lo, hi) = layout.genome_bounds(&resolved.bounds);
            let result = ga_minimize(&fitness, &lo, &hi, &cfg)?;
            let control = layout.decode(&result.best, resolved.bounds)?;
            let traj = solve_forward(
                &problem.params,
                &problem.ops,
                &problem.rho0,
                &control,
                problem.steps,
            )?;
            let terms = evaluate(problem, &traj, &control)?;
            let history = result
                .history
                .iter()
                .enumerate()
                .map(|(k, &value)| HistoryRecord {
                    k,
                    kind,
                    value,
                    terminal_term: f64::NAN,
                    integral_term: f64::NAN,
                    reg_term: f64::NAN,
                    residual: None,
                    wall_ms: None,
                })
                .collect();
            (
                control,
                terms,
                cfg.max_iters,
                "iteration-budget".to_string(),
                history,
            )
        }
    };

    let problem = &resolved.problem;
    let traj = solve_forward(
        &problem.params,
        &problem.ops,
        &problem.rho0,
        &control,
        problem.steps,
    )?;
    let (s_initial, s_final) = final_entropies(problem, &traj);

    write_string(
        &out_dir,
        "trajectory.csv",
        &trajectory_csv(&traj, &problem.rho0, stride_for(traj.len())),
    )?;
    write_string(&out_dir, "controls.csv", &control.to_csv_string())?;
    write_string(
        &out_dir,
        "controls.json",
        &(serde_json::to_string_pretty(&control)? + "\n"),
    )?;
    write_jsonl(&out_dir, "history.jsonl", &history)?;
    let summary = Summary {
        name,
        kind: kind.to_string(),
        final_objective: terms.total,
        iterations,
        stopped_by: stopped_by.clone(),
        s_final,
        s_initial,
        terminal_term: terms.terminal,
        integral_term: terms.penalty,
        reg_term: terms.reg,
        horizon: control.horizon(),
    };
    write_json(&out_dir, "summary.json", &summary)?;

    let status = if stopped_by == "criterion" || matches!(resolved.optimizer, ResolvedOptimizer::Ga(_)) {
        RunStatus::Converged
    } else {
        RunStatus::BudgetExhausted
    };
    Ok(RunOutcome {
        status,
        summary_path: out_dir.join("summary.json"),
    })
}

/// Run a scenario file with overrides; used by `run` and the tests.
pub fn run_scenario_file(path: &Path, overrides: &Overrides) -> Result<RunOutcome> {
    let scenario = crate::scenario::Scenario::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolved = scenario
        .resolve(base)
        .with_context(|| format!("validating scenario {}", path.display()))?;
    run(resolved, overrides)
}
