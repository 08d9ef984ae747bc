//! Adjoint-state gradient of the differentiable objectives, a
//! finite-difference oracle for it, and the projected-stationarity
//! residual.
//!
//! For the state equation `d rho/dt = L_c(rho)` and the objective
//! `Phi = F(rho(T)) + P int g(rho) dt + R(c)`, the co-state solves
//! `d chi/dt = -i[H_c, chi] - eps D^dag_n(chi) + P dg/drho` backward from
//! `chi(T) = -dF/drho`, and the gradient is
//! `(-K^u + 2 gamma_u u, -K^{n_j} + gamma_n)` in terms of the switching
//! functions. The finite-difference oracle checks the same quantity in the
//! hat-pairing sense: perturbing one control node perturbs the signal by a
//! piecewise-linear hat, so the nodal difference quotient of `Phi` equals
//! the time integral of the gradient field against that hat.

use crate::controls::ControlSet;
use crate::dynamics::{solve_backward, solve_forward, Trajectory};
use crate::model::switching_functions;
use crate::objectives::{evaluate, Objective, ObjectiveTerms, Problem};
use crate::qcore::{entropy_raw, hermitize, matrix_log_clamped, CoState};
use crate::{error::Error, CMat4, Result};

/// Gradient of the objective with respect to the three control components,
/// sampled at the control nodes.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub horizon: f64,
    pub u: Vec<f64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
}

impl GradientField {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        match i {
            0 => &self.u,
            1 => &self.n1,
            _ => &self.n2,
        }
    }

    /// Largest absolute nodal entry over all components.
    pub fn sup_norm(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.n1)
            .chain(&self.n2)
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }
}

/// Everything one gradient evaluation produces.
#[derive(Debug, Clone)]
pub struct GradientAssembly {
    pub field: GradientField,
    pub terms: ObjectiveTerms,
    pub forward: Trajectory,
    pub backward: Trajectory,
}

/// Terminal co-state `chi(T) = -dF/drho = 2 (S(rho_T) - ref) (log rho_T + I)`
/// with the clamped logarithm; `ref` is the initial entropy for keeping and
/// the target for steering.
pub fn transversality(problem: &Problem, rho_t: &CMat4) -> Result<CoState> {
    let reference = problem.terminal_reference()?;
    let factor = 2.0 * (entropy_raw(rho_t) - reference);
    let m = (matrix_log_clamped(rho_t) + CMat4::identity()).map(|z| z * factor);
    Ok(CoState::from_matrix_unchecked(hermitize(&m)))
}

/// Derivative `dg/drho` of the running penalty integrand: zero for plain
/// steering, `-2 (S - S0) (log rho + I)` for keeping, and
/// `-2 max(S - S_ceil, 0) (log rho + I)` for constrained steering.
pub fn penalty_source(problem: &Problem, rho: &CMat4) -> Result<CMat4> {
    match &problem.objective {
        Objective::SteerTerminal { .. } => Ok(CMat4::zeros()),
        Objective::KeepIntegral { .. } => {
            let factor = -2.0 * (entropy_raw(rho) - problem.s_initial());
            Ok((matrix_log_clamped(rho) + CMat4::identity()).map(|z| z * factor))
        }
        Objective::SteerConstrained { s_ceiling, .. } => {
            let excess = (entropy_raw(rho) - s_ceiling).max(0.0);
            if excess == 0.0 {
                return Ok(CMat4::zeros());
            }
            let factor = -2.0 * excess;
            Ok((matrix_log_clamped(rho) + CMat4::identity()).map(|z| z * factor))
        }
        other => Err(Error::domain(format!(
            "objective {} has no differentiable running penalty",
            other.kind().as_str()
        ))),
    }
}

fn penalty_coefficient(problem: &Problem) -> Result<f64> {
    match &problem.objective {
        Objective::SteerTerminal { .. } => Ok(0.0),
        Objective::KeepIntegral { penalty } | Objective::SteerConstrained { penalty, .. } => {
            Ok(*penalty)
        }
        other => Err(Error::domain(format!(
            "objective {} is not differentiable",
            other.kind().as_str()
        ))),
    }
}

/// Forward solve, objective evaluation, backward solve, and the gradient
/// field at the control nodes.
pub fn assemble_gradient(problem: &Problem, c: &ControlSet) -> Result<GradientAssembly> {
    if !problem.objective.kind().supports_gradient() {
        return Err(Error::domain(format!(
            "objective {} has no adjoint gradient",
            problem.objective.kind().as_str()
        )));
    }
    let p_coeff = penalty_coefficient(problem)?;
    let forward = solve_forward(&problem.params, &problem.ops, &problem.rho0, c, problem.steps)?;
    let terms = evaluate(problem, &forward, c)?;
    let chi_t = transversality(problem, forward.final_state())?;

    let needs_source =
        p_coeff > 0.0 && !matches!(problem.objective, Objective::SteerTerminal { .. });
    let source = |_t: f64, rho: &CMat4| {
        penalty_source(problem, rho)
            .expect("kind checked above")
            .map(|z| z * p_coeff)
    };
    let backward = solve_backward(
        &problem.params,
        &problem.ops,
        &chi_t,
        c,
        &forward,
        if needs_source { Some(&source) } else { None },
    )?;

    let (gamma_u, gamma_n) = problem.reg.integral_gammas();
    let nodes = c.subintervals() + 1;
    let mut field = GradientField {
        horizon: c.horizon(),
        u: Vec::with_capacity(nodes),
        n1: Vec::with_capacity(nodes),
        n2: Vec::with_capacity(nodes),
    };
    for (s, t) in c.node_times().enumerate() {
        let rho = forward.interpolate(t)?;
        let chi = backward.interpolate(t)?;
        let k = switching_functions(&problem.params, &problem.ops, &chi, &rho)?;
        field.u.push(-k[0] + 2.0 * gamma_u * c.u()[s]);
        field.n1.push(-k[1] + gamma_n);
        field.n2.push(-k[2] + gamma_n);
    }
    Ok(GradientAssembly {
        field,
        terms,
        forward,
        backward,
    })
}

/// The gradient field on the integration grid (one `[gu, gn1, gn2]` triple
/// per trajectory node), for diagnostics and the hat-pairing oracle.
pub fn fine_gradient(
    problem: &Problem,
    c: &ControlSet,
    forward: &Trajectory,
    backward: &Trajectory,
) -> Result<Vec<[f64; 3]>> {
    if forward.len() != backward.len() {
        return Err(Error::GridMismatch(format!(
            "forward has {} nodes, backward {}",
            forward.len(),
            backward.len()
        )));
    }
    let (gamma_u, gamma_n) = problem.reg.integral_gammas();
    let mut out = Vec::with_capacity(forward.len());
    for i in 0..forward.len() {
        let t = forward.node_time(i);
        let k = switching_functions(&problem.params, &problem.ops, backward.state(i), forward.state(i))?;
        let u = c.value_at(t)[0];
        out.push([-k[0] + 2.0 * gamma_u * u, -k[1] + gamma_n, -k[2] + gamma_n]);
    }
    Ok(out)
}

/// Pair a fine-grid gradient field with the piecewise-linear hat function
/// of every control node: `pair[comp][s] = int grad_comp(t) hat_s(t) dt`
/// (trapezoidal rule, hat support `[t_{s-1}, t_{s+1}]`).
pub fn hat_pairings(fine: &[[f64; 3]], horizon: f64, m: usize) -> [Vec<f64>; 3] {
    let steps = fine.len() - 1;
    let h = horizon / steps as f64;
    let dt = horizon / m as f64;
    let mut out = [vec![0.0; m + 1], vec![0.0; m + 1], vec![0.0; m + 1]];
    for s in 0..=m {
        let center = s as f64 * dt;
        let lo = ((center - dt) / h).ceil().max(0.0) as usize;
        let hi = (((center + dt) / h).floor() as usize).min(steps);
        for i in lo..=hi {
            let t = i as f64 * h;
            let hat = (1.0 - (t - center).abs() / dt).max(0.0);
            if hat == 0.0 {
                continue;
            }
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            for comp in 0..3 {
                out[comp][s] += w * h * hat * fine[i][comp];
            }
        }
    }
    out
}

/// Central-difference gradient of the full objective with respect to every
/// control node value. Comparable to [`hat_pairings`] of the adjoint field.
///
/// The perturbed node must stay inside the admissible box, so use interior
/// controls with `h` smaller than their distance to the bounds.
pub fn finite_difference_gradient(
    problem: &Problem,
    c: &ControlSet,
    h: f64,
) -> Result<[Vec<f64>; 3]> {
    if h <= 0.0 {
        return Err(Error::domain("finite-difference step must be positive".to_string()));
    }
    let nodes = c.subintervals() + 1;
    let mut out = [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]];
    let phi = |u: Vec<f64>, n1: Vec<f64>, n2: Vec<f64>| -> Result<f64> {
        let set = ControlSet::from_samples(u, n1, n2, c.horizon(), c.bounds())?;
        Ok(crate::objectives::evaluate_control(problem, &set)?.total)
    };
    for comp in 0..3 {
        for s in 0..nodes {
            let bump = |delta: f64| -> Result<f64> {
                let mut u = c.u().to_vec();
                let mut n1 = c.n1().to_vec();
                let mut n2 = c.n2().to_vec();
                match comp {
                    0 => u[s] += delta,
                    1 => n1[s] += delta,
                    _ => n2[s] += delta,
                }
                phi(u, n1, n2)
            };
            let plus = bump(h)?;
            let minus = bump(-h)?;
            out[comp][s] = (plus - minus) / (2.0 * h);
        }
    }
    Ok(out)
}

/// Projected-stationarity residual
/// `max_s || c(t_s) - Pr_Q(c(t_s) - alpha grad(t_s)) ||_inf`; zero exactly
/// at a projected stationary point.
pub fn pmp_residual(c: &ControlSet, field: &GradientField, alpha: f64) -> f64 {
    debug_assert_eq!(field.len(), c.subintervals() + 1);
    let bounds = c.bounds();
    let mut worst: f64 = 0.0;
    for s in 0..field.len() {
        let candidates = [
            (c.u()[s], bounds.clamp_u(c.u()[s] - alpha * field.u[s])),
            (c.n1()[s], bounds.clamp_n(c.n1()[s] - alpha * field.n1[s])),
            (c.n2()[s], bounds.clamp_n(c.n2()[s] - alpha * field.n2[s])),
        ];
        for (current, projected) in candidates {
            worst = worst.max((current - projected).abs());
        }
    }
    worst
}
