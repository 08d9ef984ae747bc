//! Built-in verification: analytic-oracle comparison, adjoint pairing
//! checks, and finite-difference gradient checks, printed as a pass/fail
//! table.

use std::path::Path;

use anyhow::{Context, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use entroq::controls::{ControlBounds, ControlSet, RegularizationSpec};
use entroq::dynamics::solve_forward;
use entroq::gradient::{
    assemble_gradient, fine_gradient, finite_difference_gradient, hat_pairings,
};
use entroq::model::{
    adjoint_liouvillian_apply, liouvillian_apply, zero_control_solution, ModelParameters,
    StaticOperators,
};
use entroq::objectives::{Objective, Problem};
use entroq::qcore::{hermiticity_deviation, hs_distance, hs_inner, von_neumann_entropy, DensityMatrix};
use entroq::{C64, CMat4};

struct Check {
    name: &'static str,
    max_error: f64,
    threshold: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.max_error < self.threshold
    }
}

fn random_hermitian(rng: &mut impl Rng) -> CMat4 {
    let mut a = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            a[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    (a + a.adjoint()).map(|z| z * 0.5)
}

fn random_interior_density(rng: &mut impl Rng) -> DensityMatrix {
    let a = {
        let mut m = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        m
    };
    let mut rho = a * a.adjoint();
    rho /= C64::new(rho.trace().re, 0.0);
    let mixed = rho.map(|z| z * 0.5) + CMat4::identity().map(|z| z * 0.125);
    DensityMatrix::new(mixed).unwrap()
}

/// Maximum Hilbert-Schmidt deviation between the integrator and the exact
/// zero-control solution evaluated with `oracle_params`.
fn oracle_check(sim_params: &ModelParameters, oracle_params: &ModelParameters) -> Result<f64> {
    let ops = StaticOperators::new(sim_params);
    let rho0 = DensityMatrix::maximally_mixed();
    let bounds = ControlBounds::new(1.0, 1.0)?;
    let c = ControlSet::zeros(10, 300.0, bounds)?;
    let traj = solve_forward(sim_params, &ops, &rho0, &c, 30_000)?;
    let mut worst: f64 = 0.0;
    for i in 0..traj.len() {
        let exact = zero_control_solution(oracle_params, &[0.25; 4], traj.node_time(i))?;
        worst = worst.max(hs_distance(&traj.density(i), &exact));
    }
    Ok(worst)
}

fn adjointness_check(params: &ModelParameters) -> Result<f64> {
    let ops = StaticOperators::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let rho = random_hermitian(&mut rng);
        let chi = random_hermitian(&mut rng);
        let c = [
            4.0 * (rng.gen::<f64>() - 0.5),
            3.0 * rng.gen::<f64>(),
            3.0 * rng.gen::<f64>(),
        ];
        let forward = liouvillian_apply(params, &ops, &rho, c)?;
        let backward = adjoint_liouvillian_apply(params, &ops, &chi, c)?;
        worst = worst.max((hs_inner(&chi, &forward) + hs_inner(&backward, &rho)).norm());
        worst = worst.max(forward.trace().norm());
        worst = worst.max(hermiticity_deviation(&forward));
    }
    Ok(worst)
}

fn gradient_check(params: &ModelParameters) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let bounds = ControlBounds::new(30.0, 10.0)?;
    let mut worst: f64 = 0.0;
    for kind in 0..3usize {
        for _ in 0..3 {
            let rho0 = random_interior_density(&mut rng);
            let s0 = von_neumann_entropy(&rho0);
            let objective = match kind {
                0 => Objective::KeepIntegral { penalty: 0.1 },
                1 => Objective::SteerTerminal { s_target: 0.4 },
                _ => Objective::SteerConstrained {
                    s_target: 0.4,
                    s_ceiling: s0 + 0.02,
                    penalty: 0.1,
                },
            };
            let problem =
                Problem::new(*params, rho0, objective, RegularizationSpec::default(), 2000)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
            let m = 4;
            let horizon = 1.5;
            let u: Vec<f64> = (0..=m).map(|_| 3.0 * (rng.gen::<f64>() - 0.5)).collect();
            let n1: Vec<f64> = (0..=m).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
            let n2: Vec<f64> = (0..=m).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
            let c = ControlSet::from_samples(u, n1, n2, horizon, bounds)?;
            let asm = assemble_gradient(&problem, &c)?;
            let fine = fine_gradient(&problem, &c, &asm.forward, &asm.backward)?;
            let pairs = hat_pairings(&fine, c.horizon(), m);
            let fd = finite_difference_gradient(&problem, &c, 1e-5)?;
            let mut num = 0.0;
            let mut den = 0.0;
            for comp in 0..3 {
                for s in 0..=m {
                    num += (fd[comp][s] - pairs[comp][s]).powi(2);
                    den += pairs[comp][s].powi(2);
                }
            }
            worst = worst.max((num / den.max(1e-300)).sqrt());
        }
    }
    Ok(worst)
}

/// Run all verification suites. Returns true iff everything passed.
pub fn verify(oracle_params_path: Option<&Path>, verbose: bool) -> Result<bool> {
    let params = ModelParameters::default();
    let oracle_params = match oracle_params_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading oracle parameters {}", path.display()))?;
            toml::from_str(&text).context("parsing oracle parameters")?
        }
        None => params,
    };

    let checks = [
        Check {
            name: "zero-control analytic oracle",
            max_error: oracle_check(&params, &oracle_params)?,
            threshold: 1e-6,
        },
        Check {
            name: "generator adjoint pairing",
            max_error: adjointness_check(&params)?,
            threshold: 1e-11,
        },
        Check {
            name: "adjoint gradient vs finite differences",
            max_error: gradient_check(&params)?,
            threshold: 1e-3,
        },
    ];

    let mut all = true;
    println!("{:<42} {:>12} {:>12} {:>8}", "check", "max error", "threshold", "status");
    for check in &checks {
        let ok = check.passed();
        all &= ok;
        if verbose || !ok {
            println!(
                "{:<42} {:>12.3e} {:>12.0e} {:>8}",
                check.name,
                check.max_error,
                check.threshold,
                if ok { "pass" } else { "FAIL" }
            );
        } else {
            println!(
                "{:<42} {:>12} {:>12.0e} {:>8}",
                check.name, "-", check.threshold, "pass"
            );
        }
    }
    Ok(all)
}
