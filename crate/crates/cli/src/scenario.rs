//! Scenario files: a flat TOML tree describing model, initial state,
//! objective, bounds, grids, initial guess, and optimizer. Parsing
//! validates cross-field consistency and normalization fills defaults, so
//! `serialize(parse(file))` is a canonical form.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use entroq::controls::{ControlBounds, ControlLayout, ControlSet, RegularizationSpec};
use entroq::model::ModelParameters;
use entroq::objectives::{Objective, Problem};
use entroq::optim::{GaConfig, GpmConfig};
use entroq::qcore::{density_from_coordinates, DensityMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_model")]
    pub model: ModelParameters,
    pub state: StateSpec,
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub regularization: RegularizationSpec,
    pub bounds: BoundsSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub initial_guess: InitialGuess,
    pub optimizer: OptimizerSpec,
    pub output: OutputSpec,
}

fn default_model() -> ModelParameters {
    ModelParameters::default()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    /// Diagonal initial state (probability 4-vector).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<[f64; 4]>,
    /// General initial state as the 16 real coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<[f64; 16]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    /// `keep-integral`, `keep-max`, `steer`, `steer-constrained`,
    /// `steer-free-time`, or `thermodynamic`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_ceiling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_temperature: Option<f64>,
    /// Diagonal observable for the thermodynamic objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable_diagonal: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub u_max: f64,
    pub n_max: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub horizon: f64,
    pub control_subintervals: usize,
    /// RK4 steps; defaults to `max(10 * control_subintervals, 2000)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Fraction of the horizon carrying the coherent control in the
    /// front-loaded class (`steer-free-time` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_fraction: Option<f64>,
}

impl GridSpec {
    pub fn effective_steps(&self) -> usize {
        self.steps
            .unwrap_or((10 * self.control_subintervals).max(2000))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialGuess {
    /// `zero`, `constant`, `sinusoid`, or `file`.
    #[serde(default = "default_guess_kind")]
    pub kind: String,
    /// Constant `(u, n1, n2)` for `constant`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<[f64; 3]>,
    /// `u(t) = amplitude * sin(frequency * t)` for `sinusoid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    /// Control CSV (`t,u,n1,n2`) for `file`, resampled onto the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn default_guess_kind() -> String {
    "zero".to_string()
}

impl Default for InitialGuess {
    fn default() -> Self {
        Self {
            kind: default_guess_kind(),
            values: None,
            amplitude: None,
            frequency: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    /// `gpm1`, `gpm2`, or `ga`.
    pub kind: String,
    // gradient-method fields
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_terminal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_integral: Option<f64>,
    // genetic-algorithm fields
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossover_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elite_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tournament_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub directory: String,
}

/// Everything a scenario resolves to before running.
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub problem: Problem,
    pub bounds: ControlBounds,
    pub initial: ControlSet,
    pub optimizer: ResolvedOptimizer,
    /// Genome layout for the GA path.
    pub layout: Option<ControlLayout>,
}

pub enum ResolvedOptimizer {
    Gpm1(GpmConfig),
    Gpm2(GpmConfig),
    Ga(GaConfig),
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario file {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).context("parsing scenario TOML")?;
        Ok(scenario)
    }

    /// Canonical serialized form (defaults filled, field order fixed).
    pub fn canonical(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing scenario")
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        match (&self.state.diagonal, &self.state.coordinates) {
            (Some(d), None) => {
                DensityMatrix::from_diagonal(d).map_err(|e| anyhow::anyhow!("state.diagonal: {e}"))
            }
            (None, Some(x)) => density_from_coordinates(x)
                .map_err(|e| anyhow::anyhow!("state.coordinates: {e}")),
            (Some(_), Some(_)) => bail!("state: give either `diagonal` or `coordinates`, not both"),
            (None, None) => bail!("state: one of `diagonal` or `coordinates` is required"),
        }
    }

    fn build_objective(&self) -> Result<Objective> {
        let o = &self.objective;
        let need = |field: &str, v: Option<f64>| -> Result<f64> {
            v.ok_or_else(|| anyhow::anyhow!("objective.{field}: required for kind {}", o.kind))
        };
        Ok(match o.kind.as_str() {
            "keep-integral" => Objective::KeepIntegral {
                penalty: need("penalty", o.penalty)?,
            },
            "keep-max" => Objective::KeepMaxDeviation,
            "steer" => Objective::SteerTerminal {
                s_target: need("s_target", o.s_target)?,
            },
            "steer-constrained" => Objective::SteerConstrained {
                s_target: need("s_target", o.s_target)?,
                s_ceiling: need("s_ceiling", o.s_ceiling)?,
                penalty: need("penalty", o.penalty)?,
            },
            "steer-free-time" => {
                let range = o.horizon_range.ok_or_else(|| {
                    anyhow::anyhow!("objective.horizon_range: required for steer-free-time")
                })?;
                Objective::SteerFreeTime {
                    s_target: need("s_target", o.s_target)?,
                    s_ceiling: need("s_ceiling", o.s_ceiling)?,
                    penalty: need("penalty", o.penalty)?,
                    horizon_range: (range[0], range[1]),
                }
            }
            "thermodynamic" => {
                let diag = o.observable_diagonal.unwrap_or([0.0; 4]);
                let mut observable = entroq::CMat4::zeros();
                for i in 0..4 {
                    observable[(i, i)] = entroq::C64::new(diag[i], 0.0);
                }
                Objective::Thermodynamic {
                    observable,
                    inverse_temperature: need("inverse_temperature", o.inverse_temperature)?,
                    maximize: false,
                }
            }
            other => bail!("objective.kind: unknown kind `{other}`"),
        })
    }

    fn build_initial_guess(
        &self,
        bounds: ControlBounds,
        base_dir: &Path,
    ) -> Result<ControlSet> {
        let m = self.grid.control_subintervals;
        let horizon = self.grid.horizon;
        let g = &self.initial_guess;
        Ok(match g.kind.as_str() {
            "zero" => ControlSet::zeros(m, horizon, bounds)?,
            "constant" => {
                let v = g.values.ok_or_else(|| {
                    anyhow::anyhow!("initial_guess.values: required for kind constant")
                })?;
                ControlSet::constant(v, m, horizon, bounds)?
            }
            "sinusoid" => {
                let a = g.amplitude.unwrap_or(1.0);
                let f = g.frequency.unwrap_or(1.0);
                ControlSet::from_fn(m, horizon, bounds, |t| [a * (f * t).sin(), 0.0, 0.0])?
            }
            "file" => {
                let rel = g.path.as_ref().ok_or_else(|| {
                    anyhow::anyhow!("initial_guess.path: required for kind file")
                })?;
                let path = base_dir.join(rel);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading initial guess {}", path.display()))?;
                let loaded = ControlSet::from_csv_str(&text, bounds)?;
                let span = loaded.horizon();
                ControlSet::from_fn(m, horizon, bounds, |t| loaded.value_at(t.min(span)))?
            }
            other => bail!("initial_guess.kind: unknown kind `{other}`"),
        })
    }

    /// Validate cross-field consistency and build the runnable pieces.
    /// `base_dir` anchors relative paths referenced by the scenario.
    pub fn resolve(self, base_dir: &Path) -> Result<ResolvedScenario> {
        let bounds = ControlBounds::new(self.bounds.u_max, self.bounds.n_max)
            .map_err(|e| anyhow::anyhow!("bounds: {e}"))?;
        self.model
            .validate()
            .map_err(|e| anyhow::anyhow!("model: {e}"))?;
        let rho0 = self.initial_state()?;
        let objective = self.build_objective()?;
        let kind = objective.kind();
        let steps = self.grid.effective_steps();
        if steps < self.grid.control_subintervals {
            bail!(
                "grid.steps: {} is below the control resolution {}",
                steps,
                self.grid.control_subintervals
            );
        }

        let problem = Problem::new(self.model, rho0, objective, self.regularization, steps)
            .map_err(|e| anyhow::anyhow!("objective: {e}"))?;

        let gradient_kind = kind.supports_gradient();
        let optimizer = match self.optimizer.kind.as_str() {
            "gpm1" | "gpm2" => {
                if !gradient_kind {
                    bail!(
                        "optimizer.kind: objective `{}` needs the genetic algorithm, not {}",
                        kind.as_str(),
                        self.optimizer.kind
                    );
                }
                let cfg = GpmConfig {
                    alpha: self.optimizer.alpha.unwrap_or(3.0),
                    momentum: self.optimizer.momentum.unwrap_or(0.9),
                    max_iters: self.optimizer.max_iters.unwrap_or(400),
                    eps_terminal: self.optimizer.eps_terminal.unwrap_or(1e-6),
                    eps_integral: self.optimizer.eps_integral.unwrap_or(1e-5),
                };
                cfg.validate().map_err(|e| anyhow::anyhow!("optimizer: {e}"))?;
                if self.optimizer.kind == "gpm1" {
                    ResolvedOptimizer::Gpm1(cfg)
                } else {
                    ResolvedOptimizer::Gpm2(cfg)
                }
            }
            "ga" => {
                if gradient_kind || kind.as_str() == "thermodynamic" {
                    bail!(
                        "optimizer.kind: objective `{}` uses the gradient methods, not ga",
                        kind.as_str()
                    );
                }
                let defaults = GaConfig::default();
                let cfg = GaConfig {
                    population: self.optimizer.population.unwrap_or(defaults.population),
                    max_iters: self.optimizer.max_iters.unwrap_or(defaults.max_iters),
                    mutation_prob: self.optimizer.mutation_prob.unwrap_or(defaults.mutation_prob),
                    crossover_prob: self
                        .optimizer
                        .crossover_prob
                        .unwrap_or(defaults.crossover_prob),
                    elite_fraction: self
                        .optimizer
                        .elite_fraction
                        .unwrap_or(defaults.elite_fraction),
                    tournament_size: self
                        .optimizer
                        .tournament_size
                        .unwrap_or(defaults.tournament_size),
                    mutation_sigma: self
                        .optimizer
                        .mutation_sigma
                        .unwrap_or(defaults.mutation_sigma),
                    trials: self.optimizer.trials.unwrap_or(1),
                    seed: self.optimizer.seed.unwrap_or(0),
                    parallel_trials: false,
                };
                cfg.validate().map_err(|e| anyhow::anyhow!("optimizer: {e}"))?;
                ResolvedOptimizer::Ga(cfg)
            }
            other => bail!("optimizer.kind: unknown kind `{other}`"),
        };

        let layout = match &problem.objective {
            Objective::KeepMaxDeviation => Some(ControlLayout::Full {
                m: self.grid.control_subintervals,
                horizon: self.grid.horizon,
            }),
            Objective::SteerFreeTime { horizon_range, .. } => {
                let fraction = self.grid.window_fraction.unwrap_or(1.0);
                if !(0.0 < fraction && fraction <= 1.0) {
                    bail!("grid.window_fraction: must lie in (0, 1], got {fraction}");
                }
                Some(ControlLayout::CoherentWindow {
                    m: self.grid.control_subintervals,
                    window_fraction: fraction,
                    horizon_range: *horizon_range,
                })
            }
            _ => None,
        };

        let initial = self.build_initial_guess(bounds, base_dir)?;
        Ok(ResolvedScenario {
            problem,
            bounds,
            initial,
            optimizer,
            layout,
            scenario: self,
        })
    }
}

