//! Real-coded genetic algorithm for bound-constrained minimization:
//! tournament selection, uniform crossover, per-gene Gaussian mutation
//! clipped to the box, and elitism. Several independently seeded trials may
//! be run, keeping the lowest objective value found.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{error::Error, Result};

/// Parameters of the genetic algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    /// Number of generations per trial.
    pub max_iters: usize,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    /// Probability that a selected pair is recombined.
    pub crossover_prob: f64,
    /// Fraction of the population copied unchanged into the next
    /// generation.
    pub elite_fraction: f64,
    pub tournament_size: usize,
    /// Mutation standard deviation as a fraction of the box width.
    pub mutation_sigma: f64,
    /// Number of independently seeded trials.
    pub trials: usize,
    pub seed: u64,
    /// Run trials in parallel instead of parallelizing fitness evaluation
    /// within each trial. Both modes are deterministic for a fixed seed.
    pub parallel_trials: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            max_iters: 350,
            mutation_prob: 0.1,
            crossover_prob: 0.7,
            elite_fraction: 0.05,
            tournament_size: 3,
            mutation_sigma: 0.05,
            trials: 1,
            seed: 0,
            parallel_trials: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::domain("population must be at least 4".to_string()));
        }
        for (name, p) in [
            ("mutation_prob", self.mutation_prob),
            ("crossover_prob", self.crossover_prob),
        ] {
            if !(0.0 < p && p < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1), got {p}")));
            }
        }
        if !(0.0..1.0).contains(&self.elite_fraction) {
            return Err(Error::domain("elite_fraction must lie in [0, 1)".to_string()));
        }
        if self.tournament_size == 0 || self.mutation_sigma <= 0.0 || self.trials == 0 {
            return Err(Error::domain("invalid GA configuration".to_string()));
        }
        Ok(())
    }
}

/// Outcome of one seeded trial.
#[derive(Debug, Clone)]
pub struct GaTrial {
    pub seed: u64,
    pub best: Vec<f64>,
    pub best_value: f64,
    /// Best-so-far value after the initial population and after every
    /// generation; non-increasing by construction.
    pub history: Vec<f64>,
}

/// Best outcome over all trials.
#[derive(Debug, Clone)]
pub struct GaResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    /// History of the winning trial.
    pub history: Vec<f64>,
    pub trials: Vec<GaTrial>,
}

/// Minimize `f` over the box `[lower, upper]`.
pub fn ga_minimize(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    lower: &[f64],
    upper: &[f64],
    cfg: &GaConfig,
) -> Result<GaResult> {
    cfg.validate()?;
    if lower.len() != upper.len() || lower.is_empty() {
        return Err(Error::domain("bound vectors must have equal, non-zero length".to_string()));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
        return Err(Error::domain("bounds must be finite with lower <= upper".to_string()));
    }

    let run = |trial: usize| run_trial(f, lower, upper, cfg, cfg.seed.wrapping_add(trial as u64));
    let trials: Vec<GaTrial> = if cfg.parallel_trials {
        (0..cfg.trials).into_par_iter().map(run).collect()
    } else {
        (0..cfg.trials).map(run).collect()
    };

    let winner = trials
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            a.best_value
                .partial_cmp(&b.best_value)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .expect("at least one trial");
    Ok(GaResult {
        best: trials[winner].best.clone(),
        best_value: trials[winner].best_value,
        history: trials[winner].history.clone(),
        trials,
    })
}

fn run_trial(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    lower: &[f64],
    upper: &[f64],
    cfg: &GaConfig,
    seed: u64,
) -> GaTrial {
    let dim = lower.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evaluate = |pop: &[(Vec<f64>, Option<f64>)]| -> Vec<f64> {
        let fits: Vec<f64> = if cfg.parallel_trials {
            pop.iter()
                .map(|(g, cached)| cached.unwrap_or_else(|| f(g)))
                .collect()
        } else {
            pop.par_iter()
                .map(|(g, cached)| cached.unwrap_or_else(|| f(g)))
                .collect()
        };
        fits
    };

    let mut population: Vec<(Vec<f64>, Option<f64>)> = (0..cfg.population)
        .map(|_| {
            let g: Vec<f64> = (0..dim)
                .map(|i| rng.gen_range(lower[i]..=upper[i]))
                .collect();
            (g, None)
        })
        .collect();
    let mut fitness = evaluate(&population);

    let mut order: Vec<usize> = (0..cfg.population).collect();
    order.sort_by(|&a, &b| fitness[a].partial_cmp(&fitness[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = population[order[0]].0.clone();
    let mut best_value = fitness[order[0]];
    let mut history = Vec::with_capacity(cfg.max_iters + 1);
    history.push(best_value);

    let elites = ((cfg.elite_fraction * cfg.population as f64).ceil() as usize).max(1);
    for _gen in 0..cfg.max_iters {
        let mut next: Vec<(Vec<f64>, Option<f64>)> = order[..elites]
            .iter()
            .map(|&i| (population[i].0.clone(), Some(fitness[i])))
            .collect();

        while next.len() < cfg.population {
            let mut a = tournament(&population, &fitness, cfg, &mut rng).to_vec();
            let mut b = tournament(&population, &fitness, cfg, &mut rng).to_vec();
            if rng.gen::<f64>() < cfg.crossover_prob {
                for i in 0..dim {
                    if rng.gen::<f64>() < 0.5 {
                        std::mem::swap(&mut a[i], &mut b[i]);
                    }
                }
            }
            mutate(&mut a, lower, upper, cfg, &mut rng);
            mutate(&mut b, lower, upper, cfg, &mut rng);
            next.push((a, None));
            if next.len() < cfg.population {
                next.push((b, None));
            }
        }

        population = next;
        fitness = evaluate(&population);
        order = (0..cfg.population).collect();
        order.sort_by(|&a, &b| {
            fitness[a].partial_cmp(&fitness[b]).unwrap_or(std::cmp::Ordering::Equal)
        });
        if fitness[order[0]] < best_value {
            best_value = fitness[order[0]];
            best = population[order[0]].0.clone();
        }
        // elitism makes the best-so-far sequence non-increasing
        assert!(
            history.last().map(|&h| best_value <= h).unwrap_or(true),
            "best-so-far sequence increased"
        );
        history.push(best_value);
    }

    GaTrial {
        seed,
        best,
        best_value,
        history,
    }
}

fn tournament<'a>(
    population: &'a [(Vec<f64>, Option<f64>)],
    fitness: &[f64],
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> &'a [f64] {
    let mut winner = rng.gen_range(0..population.len());
    for _ in 1..cfg.tournament_size {
        let challenger = rng.gen_range(0..population.len());
        if fitness[challenger] < fitness[winner] {
            winner = challenger;
        }
    }
    &population[winner].0
}

fn mutate(genome: &mut [f64], lower: &[f64], upper: &[f64], cfg: &GaConfig, rng: &mut ChaCha8Rng) {
    for i in 0..genome.len() {
        if rng.gen::<f64>() < cfg.mutation_prob {
            let width = upper[i] - lower[i];
            // Box-Muller normal sample
            let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.gen();
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            genome[i] = (genome[i] + cfg.mutation_sigma * width * z).clamp(lower[i], upper[i]);
        }
    }
}
