//! Objective functionals over entropy trajectories: evaluation with a
//! terminal / penalty / regularization breakdown, the genome-space objective
//! functions used by the genetic algorithm, and the stopping criteria of the
//! gradient methods.

use crate::controls::{
    regularization_integral, regularization_jumps, regularization_supnorm, ControlLayout,
    ControlSet, RegularizationMode, RegularizationSpec,
};
use crate::dynamics::{solve_forward, Trajectory};
use crate::model::{ModelParameters, StaticOperators};
use crate::qcore::{entropy_raw, hermiticity_deviation, hs_inner, DensityMatrix};
use crate::{error::Error, CMat4, Result};

/// The optimization goal expressed through the entropy of the trajectory.
#[derive(Debug, Clone)]
pub enum Objective {
    /// `Tr(O rho(T)) - S(rho(T)) / beta`, minimized or maximized.
    Thermodynamic {
        observable: CMat4,
        inverse_temperature: f64,
        maximize: bool,
    },
    /// Keep `S(rho(t))` at its initial value:
    /// `(S(T) - S0)^2 + P int (S(t) - S0)^2 dt`.
    KeepIntegral { penalty: f64 },
    /// Keep via the worst deviation over the grid:
    /// `max_{t_k > 0} |S(t_k) - S0|`.
    KeepMaxDeviation,
    /// Steer the terminal entropy to a target: `(S(T) - S_tar)^2`.
    SteerTerminal { s_target: f64 },
    /// Steer under a pointwise ceiling:
    /// `(S(T) - S_tar)^2 + P int max(S(t) - S_ceil, 0)^2 dt`.
    SteerConstrained {
        s_target: f64,
        s_ceiling: f64,
        penalty: f64,
    },
    /// Free-horizon steering under a pointwise ceiling:
    /// `|S(T) - S_tar| + P max_{t_k > 0} max(S(t_k) - S_ceil, 0)`.
    SteerFreeTime {
        s_target: f64,
        s_ceiling: f64,
        penalty: f64,
        horizon_range: (f64, f64),
    },
}

/// Discriminant of [`Objective`], used for dispatch and logging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Thermodynamic,
    KeepIntegral,
    KeepMaxDeviation,
    SteerTerminal,
    SteerConstrained,
    SteerFreeTime,
}

impl ObjectiveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveKind::Thermodynamic => "thermodynamic",
            ObjectiveKind::KeepIntegral => "keep-integral",
            ObjectiveKind::KeepMaxDeviation => "keep-max",
            ObjectiveKind::SteerTerminal => "steer",
            ObjectiveKind::SteerConstrained => "steer-constrained",
            ObjectiveKind::SteerFreeTime => "steer-free-time",
        }
    }

    /// Kinds whose gradient the adjoint method provides.
    pub fn supports_gradient(&self) -> bool {
        matches!(
            self,
            ObjectiveKind::KeepIntegral
                | ObjectiveKind::SteerTerminal
                | ObjectiveKind::SteerConstrained
        )
    }
}

impl Objective {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::Thermodynamic { .. } => ObjectiveKind::Thermodynamic,
            Objective::KeepIntegral { .. } => ObjectiveKind::KeepIntegral,
            Objective::KeepMaxDeviation => ObjectiveKind::KeepMaxDeviation,
            Objective::SteerTerminal { .. } => ObjectiveKind::SteerTerminal,
            Objective::SteerConstrained { .. } => ObjectiveKind::SteerConstrained,
            Objective::SteerFreeTime { .. } => ObjectiveKind::SteerFreeTime,
        }
    }
}

/// A fully specified control problem: model, initial state, objective,
/// regularization, and the integration resolution.
///
/// The initial entropy is computed once at construction and reused
/// everywhere as the keeping reference.
#[derive(Debug, Clone)]
pub struct Problem {
    pub params: ModelParameters,
    pub ops: StaticOperators,
    pub rho0: DensityMatrix,
    pub objective: Objective,
    pub reg: RegularizationSpec,
    /// RK4 steps used by every forward/backward solve of this problem.
    pub steps: usize,
    s_initial: f64,
}

impl Problem {
    pub fn new(
        params: ModelParameters,
        rho0: DensityMatrix,
        objective: Objective,
        reg: RegularizationSpec,
        steps: usize,
    ) -> Result<Self> {
        params.validate()?;
        reg.validate()?;
        if steps == 0 {
            return Err(Error::domain("steps must be positive".to_string()));
        }
        let ops = StaticOperators::new(&params);
        let s_initial = crate::qcore::von_neumann_entropy(&rho0);
        match &objective {
            Objective::Thermodynamic {
                observable,
                inverse_temperature,
                ..
            } => {
                if *inverse_temperature <= 0.0 {
                    return Err(Error::domain("inverse temperature must be positive".to_string()));
                }
                let dev = hermiticity_deviation(observable);
                if dev > crate::qcore::HERMITICITY_TOL {
                    return Err(Error::NotHermitian { deviation: dev });
                }
            }
            Objective::KeepIntegral { penalty } => {
                if *penalty < 0.0 {
                    return Err(Error::domain("penalty must be non-negative".to_string()));
                }
            }
            Objective::KeepMaxDeviation => {}
            Objective::SteerTerminal { s_target } => {
                if (*s_target - s_initial).abs() < 1e-12 {
                    return Err(Error::domain(
                        "steering target must differ from the initial entropy".to_string(),
                    ));
                }
            }
            Objective::SteerConstrained {
                s_target,
                s_ceiling,
                penalty,
            } => {
                if (*s_target - s_initial).abs() < 1e-12 {
                    return Err(Error::domain(
                        "steering target must differ from the initial entropy".to_string(),
                    ));
                }
                if *s_ceiling <= s_initial {
                    return Err(Error::domain(format!(
                        "entropy ceiling {s_ceiling} must exceed the initial entropy {s_initial}"
                    )));
                }
                if *penalty < 0.0 {
                    return Err(Error::domain("penalty must be non-negative".to_string()));
                }
            }
            Objective::SteerFreeTime {
                s_ceiling,
                penalty,
                horizon_range,
                ..
            } => {
                if *s_ceiling <= s_initial {
                    return Err(Error::domain(format!(
                        "entropy ceiling {s_ceiling} must exceed the initial entropy {s_initial}"
                    )));
                }
                if *penalty < 0.0 {
                    return Err(Error::domain("penalty must be non-negative".to_string()));
                }
                if !(horizon_range.0 > 0.0 && horizon_range.1 >= horizon_range.0) {
                    return Err(Error::domain(format!(
                        "invalid horizon range {horizon_range:?}"
                    )));
                }
            }
        }
        Ok(Self {
            params,
            ops,
            rho0,
            objective,
            reg,
            steps,
            s_initial,
        })
    }

    /// Entropy of the initial state, frozen at construction.
    pub fn s_initial(&self) -> f64 {
        self.s_initial
    }

    /// The reference entropy of the terminal term: the initial entropy for
    /// keeping, the target for steering.
    pub fn terminal_reference(&self) -> Result<f64> {
        match &self.objective {
            Objective::KeepIntegral { .. } => Ok(self.s_initial),
            Objective::SteerTerminal { s_target }
            | Objective::SteerConstrained { s_target, .. } => Ok(*s_target),
            other => Err(Error::domain(format!(
                "objective {} has no terminal entropy reference",
                other.kind().as_str()
            ))),
        }
    }
}

/// Value of an objective split into its additive parts:
/// `total = terminal + penalty + reg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerms {
    pub total: f64,
    pub terminal: f64,
    /// Penalty part with its coefficient applied (`P int g dt` or
    /// `P max ...`); zero for objectives without one.
    pub penalty: f64,
    pub reg: f64,
    /// Penalty part before the coefficient (`int g dt` or the max term),
    /// as consumed by the stopping criteria.
    pub penalty_raw: f64,
}

/// Entropy at every trajectory node.
pub fn entropy_series(traj: &Trajectory) -> Vec<f64> {
    traj.states().iter().map(entropy_raw).collect()
}

fn trapezoid(values: impl Iterator<Item = f64>, h: f64, len: usize) -> f64 {
    let mut acc = 0.0;
    for (i, v) in values.enumerate() {
        let w = if i == 0 || i + 1 == len { 0.5 } else { 1.0 };
        acc += w * v;
    }
    acc * h
}

fn regularization_value(c: &ControlSet, reg: &RegularizationSpec, steps: usize) -> f64 {
    match reg.mode {
        RegularizationMode::None => 0.0,
        RegularizationMode::Integral => regularization_integral(c, reg, steps),
        RegularizationMode::SupNorm => regularization_supnorm(c, reg),
        RegularizationMode::JumpPenalty => regularization_jumps(c, reg),
    }
}

/// Evaluate the problem objective on a forward trajectory.
pub fn evaluate(problem: &Problem, traj: &Trajectory, c: &ControlSet) -> Result<ObjectiveTerms> {
    let reg = regularization_value(c, &problem.reg, traj.len() - 1);
    let h = traj.step();
    let len = traj.len();
    let terms = match &problem.objective {
        Objective::Thermodynamic {
            observable,
            inverse_temperature,
            ..
        } => {
            let rho_t = traj.final_state();
            let terminal = hs_inner(observable, rho_t).re
                - entropy_raw(rho_t) / inverse_temperature;
            ObjectiveTerms {
                total: terminal + reg,
                terminal,
                penalty: 0.0,
                reg,
                penalty_raw: 0.0,
            }
        }
        Objective::KeepIntegral { penalty } => {
            let series = entropy_series(traj);
            let s0 = problem.s_initial;
            let terminal = (series[len - 1] - s0).powi(2);
            let raw = trapezoid(series.iter().map(|s| (s - s0).powi(2)), h, len);
            ObjectiveTerms {
                total: terminal + penalty * raw + reg,
                terminal,
                penalty: penalty * raw,
                reg,
                penalty_raw: raw,
            }
        }
        Objective::KeepMaxDeviation => {
            let series = entropy_series(traj);
            let s0 = problem.s_initial;
            let worst = series[1..]
                .iter()
                .map(|s| (s - s0).abs())
                .fold(0.0f64, f64::max);
            ObjectiveTerms {
                total: worst + reg,
                terminal: worst,
                penalty: 0.0,
                reg,
                penalty_raw: 0.0,
            }
        }
        Objective::SteerTerminal { s_target } => {
            let terminal = (entropy_raw(traj.final_state()) - s_target).powi(2);
            ObjectiveTerms {
                total: terminal + reg,
                terminal,
                penalty: 0.0,
                reg,
                penalty_raw: 0.0,
            }
        }
        Objective::SteerConstrained {
            s_target,
            s_ceiling,
            penalty,
        } => {
            let series = entropy_series(traj);
            let terminal = (series[len - 1] - s_target).powi(2);
            let raw = trapezoid(
                series.iter().map(|s| (s - s_ceiling).max(0.0).powi(2)),
                h,
                len,
            );
            ObjectiveTerms {
                total: terminal + penalty * raw + reg,
                terminal,
                penalty: penalty * raw,
                reg,
                penalty_raw: raw,
            }
        }
        Objective::SteerFreeTime {
            s_target,
            s_ceiling,
            penalty,
            ..
        } => {
            let series = entropy_series(traj);
            let terminal = (series[len - 1] - s_target).abs();
            let raw = series[1..]
                .iter()
                .map(|s| (s - s_ceiling).max(0.0))
                .fold(0.0f64, f64::max);
            ObjectiveTerms {
                total: terminal + penalty * raw + reg,
                terminal,
                penalty: penalty * raw,
                reg,
                penalty_raw: raw,
            }
        }
    };
    Ok(terms)
}

/// Solve the dynamics for a control set and evaluate the objective.
pub fn evaluate_control(problem: &Problem, c: &ControlSet) -> Result<ObjectiveTerms> {
    let traj = solve_forward(&problem.params, &problem.ops, &problem.rho0, c, problem.steps)?;
    evaluate(problem, &traj, c)
}

/// Objective value of a genome under a control layout (the function the
/// genetic algorithm minimizes).
pub fn genome_objective(
    problem: &Problem,
    layout: &ControlLayout,
    bounds: crate::controls::ControlBounds,
    genome: &[f64],
) -> Result<ObjectiveTerms> {
    let c = layout.decode(genome, bounds)?;
    evaluate_control(problem, &c)
}

/// Genome fitness closure for the genetic algorithm; decode or solve
/// failures map to `+inf`.
pub fn genome_fitness<'a>(
    problem: &'a Problem,
    layout: &'a ControlLayout,
    bounds: crate::controls::ControlBounds,
) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |genome: &[f64]| {
        genome_objective(problem, layout, bounds, genome)
            .map(|t| t.total)
            .unwrap_or(f64::INFINITY)
    }
}

/// Stopping criterion of the gradient methods.
///
/// Keeping: `(S(T)-S0)^2 <= eps_1` and `(1/P) int (S-S0)^2 dt <= eps_2`.
/// Steering: `(S(T)-S_tar)^2 <= eps_1`.
/// Constrained steering: `(S(T)-S_tar)^2 <= eps_1` and
/// `(1/P) int max(S-S_ceil,0)^2 dt <= eps_2`.
pub fn stopping_met(
    problem: &Problem,
    terms: &ObjectiveTerms,
    eps_terminal: f64,
    eps_integral: f64,
) -> Result<bool> {
    match &problem.objective {
        Objective::KeepIntegral { penalty } | Objective::SteerConstrained { penalty, .. } => {
            let scaled = if *penalty > 0.0 {
                terms.penalty_raw / penalty
            } else {
                terms.penalty_raw
            };
            Ok(terms.terminal <= eps_terminal && scaled <= eps_integral)
        }
        Objective::SteerTerminal { .. } => Ok(terms.terminal <= eps_terminal),
        other => Err(Error::domain(format!(
            "no gradient-method stopping criterion for objective {}",
            other.kind().as_str()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controls::ControlBounds;
    use crate::qcore::MAX_ENTROPY;

    fn bounds() -> ControlBounds {
        ControlBounds::new(30.0, 10.0).unwrap()
    }

    fn keep_problem(epsilon: f64, penalty: f64) -> Problem {
        let params = ModelParameters {
            epsilon,
            ..ModelParameters::default()
        };
        let rho0 = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.1, 0.1]).unwrap();
        Problem::new(
            params,
            rho0,
            Objective::KeepIntegral { penalty },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap()
    }

    #[test]
    fn thermodynamic_reference_values() {
        let params = ModelParameters::default();
        let iso = DensityMatrix::maximally_mixed();
        let problem = Problem::new(
            params,
            iso,
            Objective::Thermodynamic {
                observable: CMat4::zeros(),
                inverse_temperature: 1.0,
                maximize: false,
            },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let c = ControlSet::zeros(10, 5.0, bounds()).unwrap();

        // pure terminal state: objective is zero for O = 0
        let pure = DensityMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let traj = hold_state(&pure, 5.0);
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert_eq!(terms.total, 0.0);

        // maximally mixed terminal state: -log 4
        let traj = hold_state(&iso, 5.0);
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert!((terms.total + MAX_ENTROPY).abs() < 1e-12);

        // a multiple of the identity shifts the value by a constant
        let shifted = Problem::new(
            ModelParameters::default(),
            iso,
            Objective::Thermodynamic {
                observable: CMat4::identity().map(|z| z * 2.5),
                inverse_temperature: 1.0,
                maximize: false,
            },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let terms = evaluate(&shifted, &traj, &c).unwrap();
        assert!((terms.total - (2.5 - MAX_ENTROPY)).abs() < 1e-12);
    }

    // synthetic constant trajectory for evaluator tests
    fn hold_state(rho: &DensityMatrix, horizon: f64) -> Trajectory {
        let params = ModelParameters {
            epsilon: 0.0,
            ..ModelParameters::default()
        };
        let ops = StaticOperators::new(&params);
        // a diagonal state under the free Hamiltonian stays put
        let c = ControlSet::zeros(2, horizon, bounds()).unwrap();
        solve_forward(&params, &ops, rho, &c, 100).unwrap()
    }

    #[test]
    fn keeping_is_zero_at_the_decoupled_fixed_point() {
        let problem = keep_problem(0.0, 0.1);
        let c = ControlSet::zeros(10, 5.0, bounds()).unwrap();
        let traj = solve_forward(&problem.params, &problem.ops, &problem.rho0, &c, 2000).unwrap();
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert!(terms.total < 1e-20);
        assert!(stopping_met(&problem, &terms, 1e-6, 1e-5).unwrap());

        // the max-deviation variant also vanishes there
        let problem2 = Problem::new(
            problem.params,
            problem.rho0,
            Objective::KeepMaxDeviation,
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let terms = evaluate(&problem2, &traj, &c).unwrap();
        assert!(terms.total < 1e-12);
    }

    #[test]
    fn steering_terminal_matches_definition() {
        let params = ModelParameters::default();
        let rho0 = DensityMatrix::maximally_mixed();
        let c = ControlSet::zeros(10, 5.0, bounds()).unwrap();
        let ops = StaticOperators::new(&params);
        let traj = solve_forward(&params, &ops, &rho0, &c, 2000).unwrap();
        let s_final = entropy_raw(traj.final_state());

        let problem = Problem::new(
            params,
            rho0,
            Objective::SteerTerminal { s_target: s_final },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert_eq!(terms.total, 0.0);
        assert!(stopping_met(&problem, &terms, 1e-6, 1e-5).unwrap());

        let problem = Problem::new(
            params,
            rho0,
            Objective::SteerTerminal { s_target: 0.4 },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert!((terms.total - (s_final - 0.4).powi(2)).abs() < 1e-15);
        assert!(!stopping_met(&problem, &terms, 1e-6, 1e-5).unwrap());
    }

    #[test]
    fn ceiling_at_max_entropy_reduces_to_plain_steering() {
        let params = ModelParameters::default();
        let rho0 = DensityMatrix::maximally_mixed();
        let ops = StaticOperators::new(&params);
        let c = ControlSet::constant([1.0, 0.5, 0.5], 10, 5.0, bounds()).unwrap();
        let traj = solve_forward(&params, &ops, &rho0, &c, 2000).unwrap();
        let constrained = Problem::new(
            params,
            rho0,
            Objective::SteerConstrained {
                s_target: 0.4,
                s_ceiling: MAX_ENTROPY + 1e-6,
                penalty: 0.05,
            },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let plain = Problem::new(
            params,
            rho0,
            Objective::SteerTerminal { s_target: 0.4 },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let a = evaluate(&constrained, &traj, &c).unwrap();
        let b = evaluate(&plain, &traj, &c).unwrap();
        assert_eq!(a.penalty, 0.0);
        assert_eq!(a.total, b.total);
    }

    #[test]
    fn zero_penalty_keeps_only_the_terminal_term() {
        let problem = keep_problem(0.1, 0.0);
        let c = ControlSet::zeros(10, 5.0, bounds()).unwrap();
        let traj = solve_forward(&problem.params, &problem.ops, &problem.rho0, &c, 2000).unwrap();
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert_eq!(terms.total, terms.terminal);
        assert!(terms.penalty == 0.0 && terms.penalty_raw > 0.0);
    }

    #[test]
    fn max_deviation_never_decreases_under_grid_refinement() {
        let problem = keep_problem(0.1, 0.1);
        let c = ControlSet::zeros(10, 5.0, bounds()).unwrap();
        let traj = solve_forward(&problem.params, &problem.ops, &problem.rho0, &c, 2000).unwrap();
        let series = entropy_series(&traj);
        let s0 = problem.s_initial();
        let max_over = |stride: usize| {
            series
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(i, _)| i % stride == 0)
                .map(|(_, s)| (s - s0).abs())
                .fold(0.0f64, f64::max)
        };
        let coarse = max_over(2);
        let fine = max_over(1);
        assert!(fine >= coarse - 1e-9);
    }

    #[test]
    fn free_time_penalty_is_zero_below_the_ceiling() {
        let params = ModelParameters::default();
        let rho0 = DensityMatrix::from_diagonal(&[0.0, 0.5, 0.0, 0.5]).unwrap();
        let problem = Problem::new(
            params,
            rho0,
            Objective::SteerFreeTime {
                s_target: 0.4,
                s_ceiling: MAX_ENTROPY + 1e-3,
                penalty: 0.5,
                horizon_range: (38.0, 40.0),
            },
            RegularizationSpec::default(),
            2000,
        )
        .unwrap();
        let c = ControlSet::zeros(10, 39.0, bounds()).unwrap();
        let traj = solve_forward(&problem.params, &problem.ops, &problem.rho0, &c, 2000).unwrap();
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert_eq!(terms.penalty, 0.0);
        assert!(terms.total >= 0.0);
    }

    #[test]
    fn objective_values_are_finite_and_nonnegative() {
        let problem = keep_problem(0.1, 0.1);
        let c = ControlSet::from_fn(20, 5.0, bounds(), |t| [3.0 * (2.0 * t).sin(), 1.0, 2.0])
            .unwrap();
        let traj = solve_forward(&problem.params, &problem.ops, &problem.rho0, &c, 2000).unwrap();
        let terms = evaluate(&problem, &traj, &c).unwrap();
        assert!(terms.total.is_finite() && terms.total >= 0.0);
        assert!(terms.terminal >= 0.0 && terms.penalty >= 0.0 && terms.reg >= 0.0);
    }

    #[test]
    fn genome_objectives_at_reference_points() {
        use crate::controls::{ControlLayout, RegularizationMode};
        // zero genome at the decoupled fixed point: the keeping objective
        // and its jump penalty both vanish
        let reg = RegularizationSpec {
            gamma_u: 0.0,
            gamma_n: 0.01,
            delta_n: [1.0, 1.0],
            mode: RegularizationMode::JumpPenalty,
        };
        let problem = Problem::new(
            ModelParameters {
                epsilon: 0.0,
                ..ModelParameters::default()
            },
            DensityMatrix::from_diagonal(&[0.5, 0.3, 0.1, 0.1]).unwrap(),
            Objective::KeepMaxDeviation,
            reg,
            2000,
        )
        .unwrap();
        let b = crate::controls::ControlBounds::new(4.0, 4.0).unwrap();
        let layout = ControlLayout::Full { m: 10, horizon: 5.0 };
        let terms = genome_objective(&problem, &layout, b, &vec![0.0; 33]).unwrap();
        assert!(terms.total < 1e-12);

        // zero coherent genes in the front-loaded class: sup-norm term zero
        let reg = RegularizationSpec {
            gamma_u: 0.1,
            gamma_n: 0.0,
            delta_n: [1.0, 1.0],
            mode: RegularizationMode::SupNorm,
        };
        let problem = Problem::new(
            ModelParameters::default(),
            DensityMatrix::from_diagonal(&[0.0, 0.5, 0.0, 0.5]).unwrap(),
            Objective::SteerFreeTime {
                s_target: 0.4,
                s_ceiling: crate::qcore::MAX_ENTROPY,
                penalty: 0.5,
                horizon_range: (38.0, 40.0),
            },
            reg,
            2000,
        )
        .unwrap();
        let layout = ControlLayout::CoherentWindow {
            m: 20,
            window_fraction: 0.3,
            horizon_range: (38.0, 40.0),
        };
        let mut genome = vec![0.0; 21];
        genome.push(39.0);
        let terms = genome_objective(&problem, &layout, b, &genome).unwrap();
        assert_eq!(terms.reg, 0.0);

        // the fitness closure maps invalid genomes to +inf
        let fitness = genome_fitness(&problem, &layout, b);
        assert!(fitness(&[0.0; 3]).is_infinite());
    }

    #[test]
    fn problem_validation_rejects_inconsistent_setups() {
        let params = ModelParameters::default();
        let rho0 = DensityMatrix::from_diagonal(&[0.0, 0.5, 0.0, 0.5]).unwrap();
        let s0 = 2.0f64.ln();
        assert!(Problem::new(
            params,
            rho0,
            Objective::SteerTerminal { s_target: s0 },
            RegularizationSpec::default(),
            2000,
        )
        .is_err());
        assert!(Problem::new(
            params,
            rho0,
            Objective::SteerConstrained {
                s_target: 0.4,
                s_ceiling: 0.5 * s0,
                penalty: 0.05
            },
            RegularizationSpec::default(),
            2000,
        )
        .is_err());
    }
}
