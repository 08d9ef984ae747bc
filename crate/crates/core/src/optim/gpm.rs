//! Projected gradient methods with a fixed step, one-step (GPM-1) and
//! heavy-ball two-step (GPM-2):
//!
//! `c^{k+1}(t) = Pr_Q(c^k(t) - alpha grad Phi(c^k)(t) [+ beta (c^k - c^{k-1})])`
//!
//! applied nodewise to the piecewise-linear control representation, with
//! `alpha` and the momentum weight `beta` fixed over all iterations.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::controls::ControlSet;
use crate::gradient::{assemble_gradient, pmp_residual};
use crate::objectives::{stopping_met, ObjectiveTerms, Problem};
use crate::{error::Error, Result};

/// Algorithmic parameters of the projected gradient iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpmConfig {
    /// Gradient step, fixed over all iterations.
    pub alpha: f64,
    /// Heavy-ball weight in `[0, 1)`; ignored by GPM-1.
    pub momentum: f64,
    /// Largest number of gradient updates.
    pub max_iters: usize,
    /// Threshold on the squared terminal term.
    pub eps_terminal: f64,
    /// Threshold on the coefficient-free integral term.
    pub eps_integral: f64,
}

impl GpmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::domain(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        Ok(())
    }
}

/// One history row per evaluated iterate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub value: f64,
    pub terminal: f64,
    pub integral: f64,
    pub reg: f64,
    pub residual: f64,
    pub wall_ms: f64,
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    CriterionMet,
    IterationBudget,
}

#[derive(Debug, Clone)]
pub struct GpmResult {
    pub control: ControlSet,
    pub history: Vec<IterationRecord>,
    pub stop: StopReason,
    /// Number of gradient updates performed before stopping.
    pub iterations: usize,
    pub terms: ObjectiveTerms,
}

/// One-step projected gradient method.
pub fn gpm1(problem: &Problem, c0: ControlSet, cfg: &GpmConfig) -> Result<GpmResult> {
    run(problem, c0, cfg, false)
}

/// Two-step (heavy-ball) projected gradient method; the first update is a
/// plain GPM-1 step.
pub fn gpm2(problem: &Problem, c0: ControlSet, cfg: &GpmConfig) -> Result<GpmResult> {
    run(problem, c0, cfg, true)
}

fn run(problem: &Problem, c0: ControlSet, cfg: &GpmConfig, momentum: bool) -> Result<GpmResult> {
    cfg.validate()?;
    let bounds = c0.bounds();
    let horizon = c0.horizon();
    let mut c = c0;
    let mut previous: Option<ControlSet> = None;
    let mut history = Vec::with_capacity(cfg.max_iters + 1);

    for k in 0..=cfg.max_iters {
        let started = Instant::now();
        let asm = assemble_gradient(problem, &c)?;
        if !asm.terms.total.is_finite() {
            return Err(Error::OptimizerAbort {
                iteration: k,
                reason: format!("objective value is not finite: {}", asm.terms.total),
            });
        }
        let residual = pmp_residual(&c, &asm.field, cfg.alpha);
        history.push(IterationRecord {
            k,
            value: asm.terms.total,
            terminal: asm.terms.terminal,
            integral: asm.terms.penalty,
            reg: asm.terms.reg,
            residual,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        if stopping_met(problem, &asm.terms, cfg.eps_terminal, cfg.eps_integral)? {
            return Ok(GpmResult {
                control: c,
                history,
                stop: StopReason::CriterionMet,
                iterations: k,
                terms: asm.terms,
            });
        }
        if k == cfg.max_iters {
            return Ok(GpmResult {
                control: c,
                history,
                stop: StopReason::IterationBudget,
                iterations: k,
                terms: asm.terms,
            });
        }

        let beta = if momentum && k >= 1 { cfg.momentum } else { 0.0 };
        let nodes = c.subintervals() + 1;
        let mut u = Vec::with_capacity(nodes);
        let mut n1 = Vec::with_capacity(nodes);
        let mut n2 = Vec::with_capacity(nodes);
        for s in 0..nodes {
            let momentum_term = |comp: usize| -> f64 {
                previous
                    .as_ref()
                    .map(|prev| beta * (c.component(comp)[s] - prev.component(comp)[s]))
                    .unwrap_or(0.0)
            };
            u.push(c.u()[s] - cfg.alpha * asm.field.u[s] + momentum_term(0));
            n1.push(c.n1()[s] - cfg.alpha * asm.field.n1[s] + momentum_term(1));
            n2.push(c.n2()[s] - cfg.alpha * asm.field.n2[s] + momentum_term(2));
        }
        let next = ControlSet::project_box(u, n1, n2, horizon, bounds)?;
        // every iterate must be admissible, with no tolerance
        assert!(
            next.u().iter().all(|&x| x.abs() <= bounds.u_max)
                && next
                    .n1()
                    .iter()
                    .chain(next.n2())
                    .all(|&x| (0.0..=bounds.n_max).contains(&x)),
            "projected iterate escaped the admissible box"
        );
        previous = Some(std::mem::replace(&mut c, next));
    }
    unreachable!("loop returns on criterion or budget");
}
