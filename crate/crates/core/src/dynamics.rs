//! Fixed-step RK4 propagation of the state (forward) and the co-state
//! (backward) with dense trajectory storage and linear interpolation.
//!
//! A fixed step keeps the forward and backward trajectories on one shared
//! grid, which the gradient assembly requires. The state is re-symmetrized
//! and trace-renormalized after every step; the co-state is re-symmetrized
//! only. Eigenvalue positivity is not enforced during integration so the
//! dynamics are not biased; entropy evaluations clamp instead.

use crate::controls::ControlSet;
use crate::model::{
    adjoint_liouvillian_apply_unchecked, liouvillian_apply_unchecked, ModelParameters,
    StaticOperators,
};
use crate::qcore::{hermitize, CoState, DensityMatrix};
use crate::{error::Error, C64, CMat4, Result};

/// Integration direction a trajectory was produced by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Time-indexed sequence of 4x4 Hermitian matrices on a uniform grid over
/// `[0, horizon]`, stored in ascending time order regardless of the
/// integration direction.
#[derive(Debug, Clone)]
pub struct Trajectory {
    horizon: f64,
    states: Vec<CMat4>,
    direction: Direction,
    /// Largest `|Tr - 1|` observed before renormalization (forward only).
    max_trace_drift: f64,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Number of stored nodes (integration steps + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Integration step between adjacent nodes.
    pub fn step(&self) -> f64 {
        self.horizon / (self.states.len() - 1) as f64
    }

    pub fn node_time(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    pub fn state(&self, i: usize) -> &CMat4 {
        &self.states[i]
    }

    pub fn states(&self) -> &[CMat4] {
        &self.states
    }

    pub fn final_state(&self) -> &CMat4 {
        self.states.last().expect("trajectory is never empty")
    }

    /// Forward-trajectory node as a validated-by-construction state.
    pub fn density(&self, i: usize) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.states[i])
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.max_trace_drift
    }

    /// Linear interpolation between bracketing nodes; exact at nodes.
    pub fn interpolate(&self, t: f64) -> Result<CMat4> {
        let tol = 1e-9 * self.horizon.max(1.0);
        if !((-tol..=self.horizon + tol).contains(&t)) {
            return Err(Error::domain(format!(
                "time {t} outside the trajectory span [0, {}]",
                self.horizon
            )));
        }
        let t = t.clamp(0.0, self.horizon);
        let steps = (self.states.len() - 1) as f64;
        let idx = t / self.horizon * steps;
        let near = idx.round();
        if (idx - near).abs() < 1e-9 {
            return Ok(self.states[(near as usize).min(self.states.len() - 1)]);
        }
        let i = (idx.floor() as usize).min(self.states.len() - 2);
        let w = idx - i as f64;
        Ok(self.states[i].map(|z| z * (1.0 - w)) + self.states[i + 1].map(|z| z * w))
    }
}

#[inline]
fn rk4_step(f: &impl Fn(f64, &CMat4) -> CMat4, t: f64, y: &CMat4, h: f64) -> CMat4 {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + k1.map(|z| z * (0.5 * h))));
    let k3 = f(t + 0.5 * h, &(y + k2.map(|z| z * (0.5 * h))));
    let k4 = f(t + h, &(y + k3.map(|z| z * h)));
    y + (k1 + k2.map(|z| z * 2.0) + k3.map(|z| z * 2.0) + k4).map(|z| z * (h / 6.0))
}

/// Propagate the master equation from `rho0` over `[0, c.horizon()]` with
/// `steps` RK4 steps, storing the state at every node.
///
/// After each step the state is re-symmetrized and its trace renormalized;
/// drift beyond `1e-6` or a non-finite entry aborts with the step index.
pub fn solve_forward(
    p: &ModelParameters,
    ops: &StaticOperators,
    rho0: &DensityMatrix,
    c: &ControlSet,
    steps: usize,
) -> Result<Trajectory> {
    if steps < c.subintervals() {
        return Err(Error::domain(format!(
            "steps ({steps}) must be at least the control resolution ({})",
            c.subintervals()
        )));
    }
    let horizon = c.horizon();
    let h = horizon / steps as f64;
    let f = |t: f64, y: &CMat4| liouvillian_apply_unchecked(p, ops, y, c.value_at(t));
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = *rho0.matrix();
    let mut max_trace_drift: f64 = 0.0;
    states.push(y);
    for i in 0..steps {
        let t = i as f64 * h;
        y = rk4_step(&f, t, &y, h);
        y = hermitize(&y);
        let trace = y.trace().re;
        let drift = (trace - 1.0).abs();
        if !drift.is_finite() || drift > 1e-6 {
            return Err(Error::IntegrationFailure {
                step: i,
                reason: format!("state trace drifted to {trace}"),
            });
        }
        max_trace_drift = max_trace_drift.max(drift);
        y /= C64::new(trace, 0.0);
        states.push(y);
    }
    Ok(Trajectory {
        horizon,
        states,
        direction: Direction::Forward,
        max_trace_drift,
    })
}

/// Integrate the co-state equation
/// `d chi / dt = -i [H_c, chi] - eps D^dag_n(chi) + source(t, rho(t))`
/// backward from `chi(T) = chi_t` on the grid of `forward`.
///
/// The state entering the source is obtained from the forward trajectory by
/// linear interpolation at the RK stage times. The co-state is
/// re-symmetrized after every step.
pub fn solve_backward(
    p: &ModelParameters,
    ops: &StaticOperators,
    chi_t: &CoState,
    c: &ControlSet,
    forward: &Trajectory,
    source: Option<&(dyn Fn(f64, &CMat4) -> CMat4 + '_)>,
) -> Result<Trajectory> {
    if (forward.horizon() - c.horizon()).abs() > 1e-12 * c.horizon().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "forward trajectory spans [0, {}] but controls span [0, {}]",
            forward.horizon(),
            c.horizon()
        )));
    }
    let steps = forward.len() - 1;
    let horizon = forward.horizon();
    let h = horizon / steps as f64;
    let f = |t: f64, y: &CMat4| {
        let mut out = adjoint_liouvillian_apply_unchecked(p, ops, y, c.value_at(t));
        if let Some(src) = source {
            let rho = forward
                .interpolate(t)
                .expect("stage time within the trajectory span");
            out += src(t, &rho);
        }
        out
    };
    let mut states = vec![CMat4::zeros(); steps + 1];
    let mut y = *chi_t.matrix();
    states[steps] = y;
    for i in (0..steps).rev() {
        let t = (i + 1) as f64 * h;
        y = rk4_step(&f, t, &y, -h);
        y = hermitize(&y);
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::IntegrationFailure {
                step: i,
                reason: "co-state diverged".to_string(),
            });
        }
        states[i] = y;
    }
    Ok(Trajectory {
        horizon,
        states,
        direction: Direction::Backward,
        max_trace_drift: 0.0,
    })
}
