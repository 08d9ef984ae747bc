//! The controlled two-qubit generator: Hamiltonians, dissipator, the
//! co-state generator, switching functions, and the exact zero-control
//! solution.
//!
//! Conventions. The two-qubit basis is `|q1 q2>` with flat index
//! `2*q1 + q2`. The ladder operators are `sigma^+ = [[0,0],[1,0]]` and
//! `sigma^- = [[0,1],[0,0]]`, so the dissipator at zero photon density
//! relaxes every initial state toward `diag(1,0,0,0)`. The inner product is
//! `<A,B> = Tr(A^dag B)`, real on Hermitian pairs.

use serde::{Deserialize, Serialize};

use crate::qcore::{hs_inner, DensityMatrix};
use crate::{error::Error, C64, CMat2, CMat4, Result};

/// Physical constants of the model.
///
/// `epsilon` scales both the Lamb-shift Hamiltonian and the dissipator;
/// `omega` are the qubit transition frequencies, `lambda_shift` the
/// Lamb-shift coefficients, `omega_diss` the dissipation coefficients, and
/// `(theta, phi)` the polar angles of the coherent-drive directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParameters {
    pub epsilon: f64,
    pub omega: [f64; 2],
    pub lambda_shift: [f64; 2],
    pub omega_diss: [f64; 2],
    pub theta: [f64; 2],
    pub phi: [f64; 2],
}

impl Default for ModelParameters {
    /// Baseline parameter set used by the bundled scenarios.
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            epsilon: 0.1,
            omega: [1.0, 0.5],
            lambda_shift: [0.3, 0.5],
            omega_diss: [0.2, 0.6],
            theta: [PI / 3.0, PI / 4.0],
            phi: [PI / 4.0, PI / 3.0],
        }
    }
}

impl ModelParameters {
    /// Check positivity constraints (`epsilon = 0` is allowed).
    pub fn validate(&self) -> Result<()> {
        if self.epsilon < 0.0 {
            return Err(Error::domain(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        for (name, pair) in [
            ("omega", &self.omega),
            ("lambda_shift", &self.lambda_shift),
            ("omega_diss", &self.omega_diss),
        ] {
            if pair.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {pair:?}")));
            }
        }
        Ok(())
    }
}

const PAULI_X: CMat2 = CMat2::new(
    C64::new(0.0, 0.0),
    C64::new(1.0, 0.0),
    C64::new(1.0, 0.0),
    C64::new(0.0, 0.0),
);
const PAULI_Y: CMat2 = CMat2::new(
    C64::new(0.0, 0.0),
    C64::new(0.0, -1.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, 0.0),
);
const PAULI_Z: CMat2 = CMat2::new(
    C64::new(1.0, 0.0),
    C64::new(0.0, 0.0),
    C64::new(0.0, 0.0),
    C64::new(-1.0, 0.0),
);

// Diagonals of sigma_j^+ sigma_j^- and sigma_j^- sigma_j^+.
const EMIT_PROJ: [[f64; 4]; 2] = [[0.0, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 1.0]];
const ABSORB_PROJ: [[f64; 4]; 2] = [[1.0, 1.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0]];
// Diagonals of W_1 = sigma_z x I and W_2 = I x sigma_z.
const W_DIAG: [[f64; 4]; 2] = [[1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]];

/// Immutable operator set assembled once from the parameters.
#[derive(Debug, Clone)]
pub struct StaticOperators {
    /// Free Hamiltonian `(omega_1/2) sigma_z x I + (omega_2/2) I x sigma_z`.
    pub h_free: CMat4,
    /// Coherent interaction operator `V = Q_1 x I + I x Q_2`.
    pub v: CMat4,
    /// Lamb-shift operators `W_1, W_2`.
    pub w: [CMat4; 2],
    /// Single-qubit drive directions `Q_j`.
    pub q: [CMat2; 2],
    /// Two-qubit ladder operators.
    pub sigma_plus: [CMat4; 2],
    pub sigma_minus: [CMat4; 2],
    /// Diagonal of the free Hamiltonian (it is diagonal in this basis).
    pub h_free_diag: [f64; 4],
}

impl StaticOperators {
    /// Assemble the operator set from the tensor-product formulas.
    pub fn new(p: &ModelParameters) -> Self {
        let id2 = CMat2::identity();
        let q: [CMat2; 2] = std::array::from_fn(|j| {
            let (st, ct) = p.theta[j].sin_cos();
            let (sp, cp) = p.phi[j].sin_cos();
            PAULI_X.map(|z| z * (st * cp)) + PAULI_Y.map(|z| z * (st * sp)) + PAULI_Z.map(|z| z * ct)
        });
        let v = q[0].kronecker(&id2) + id2.kronecker(&q[1]);
        let w = [PAULI_Z.kronecker(&id2), id2.kronecker(&PAULI_Z)];
        let h_free = w[0].map(|z| z * (p.omega[0] / 2.0)) + w[1].map(|z| z * (p.omega[1] / 2.0));
        let mut h_free_diag = [0.0; 4];
        for i in 0..4 {
            h_free_diag[i] =
                p.omega[0] / 2.0 * W_DIAG[0][i] + p.omega[1] / 2.0 * W_DIAG[1][i];
        }
        let splus = CMat2::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        );
        let sminus = splus.transpose();
        Self {
            h_free,
            v,
            w,
            q,
            sigma_plus: [splus.kronecker(&id2), id2.kronecker(&splus)],
            sigma_minus: [sminus.kronecker(&id2), id2.kronecker(&sminus)],
            h_free_diag,
        }
    }
}

// `sigma_j^- m sigma_j^+`: shift the excited block of qubit j down.
#[inline]
fn lower_shuffle(j: usize, m: &CMat4) -> CMat4 {
    let mut out = CMat4::zeros();
    match j {
        0 => {
            for i in 0..2 {
                for k in 0..2 {
                    out[(i, k)] = m[(i + 2, k + 2)];
                }
            }
        }
        _ => {
            for a in 0..2 {
                for b in 0..2 {
                    out[(2 * a, 2 * b)] = m[(2 * a + 1, 2 * b + 1)];
                }
            }
        }
    }
    out
}

// `sigma_j^+ m sigma_j^-`: shift the ground block of qubit j up.
#[inline]
fn raise_shuffle(j: usize, m: &CMat4) -> CMat4 {
    let mut out = CMat4::zeros();
    match j {
        0 => {
            for i in 0..2 {
                for k in 0..2 {
                    out[(i + 2, k + 2)] = m[(i, k)];
                }
            }
        }
        _ => {
            for a in 0..2 {
                for b in 0..2 {
                    out[(2 * a + 1, 2 * b + 1)] = m[(2 * a, 2 * b)];
                }
            }
        }
    }
    out
}

// Accumulate `-i [H(u, n), m]` into `out`; the Hamiltonian splits into a
// diagonal part (free + Lamb shift) and the dense part `u V`.
#[inline]
fn add_minus_i_commutator(
    p: &ModelParameters,
    ops: &StaticOperators,
    m: &CMat4,
    u: f64,
    n: [f64; 2],
    out: &mut CMat4,
) {
    let mut hdiag = [0.0; 4];
    for i in 0..4 {
        hdiag[i] = ops.h_free_diag[i]
            + p.epsilon
                * (p.lambda_shift[0] * n[0] * W_DIAG[0][i]
                    + p.lambda_shift[1] * n[1] * W_DIAG[1][i]);
    }
    for i in 0..4 {
        for k in 0..4 {
            let d = hdiag[i] - hdiag[k];
            let z = m[(i, k)];
            // -i * d * z
            out[(i, k)] += C64::new(d * z.im, -d * z.re);
        }
    }
    if u != 0.0 {
        let comm = ops.v * m - m * ops.v;
        for i in 0..4 {
            for k in 0..4 {
                let z = comm[(i, k)];
                out[(i, k)] += C64::new(u * z.im, -u * z.re);
            }
        }
    }
}

/// Dissipator `sum_j D_{n_j, j}(rho)` (without the coupling factor).
fn dissipator(p: &ModelParameters, rho: &CMat4, n: [f64; 2]) -> CMat4 {
    let mut out = CMat4::zeros();
    for j in 0..2 {
        let down = p.omega_diss[j] * (n[j] + 1.0);
        let up = p.omega_diss[j] * n[j];
        out += lower_shuffle(j, rho).map(|z| z * (2.0 * down));
        out += raise_shuffle(j, rho).map(|z| z * (2.0 * up));
        for i in 0..4 {
            for k in 0..4 {
                let w = down * (EMIT_PROJ[j][i] + EMIT_PROJ[j][k])
                    + up * (ABSORB_PROJ[j][i] + ABSORB_PROJ[j][k]);
                out[(i, k)] -= rho[(i, k)].scale(w);
            }
        }
    }
    out
}

/// Adjoint dissipator `sum_j D^dag_{n_j, j}(chi)` with respect to
/// `<A,B> = Tr(A^dag B)`.
fn dissipator_adjoint(p: &ModelParameters, chi: &CMat4, n: [f64; 2]) -> CMat4 {
    let mut out = CMat4::zeros();
    for j in 0..2 {
        let down = p.omega_diss[j] * (n[j] + 1.0);
        let up = p.omega_diss[j] * n[j];
        out += raise_shuffle(j, chi).map(|z| z * (2.0 * down));
        out += lower_shuffle(j, chi).map(|z| z * (2.0 * up));
        for i in 0..4 {
            for k in 0..4 {
                let w = down * (EMIT_PROJ[j][i] + EMIT_PROJ[j][k])
                    + up * (ABSORB_PROJ[j][i] + ABSORB_PROJ[j][k]);
                out[(i, k)] -= chi[(i, k)].scale(w);
            }
        }
    }
    out
}

#[inline]
fn check_photon_densities(n: [f64; 2]) -> Result<()> {
    if n[0] < 0.0 || n[1] < 0.0 {
        return Err(Error::domain(format!(
            "incoherent controls must be non-negative, got {n:?}"
        )));
    }
    Ok(())
}

/// Right-hand side of the master equation,
/// `-i [H_S + eps sum_j Lambda_j W_j n_j + V u, rho] + eps sum_j D_{n_j, j}(rho)`.
///
/// The output is traceless and Hermitian for Hermitian input.
pub fn liouvillian_apply(
    p: &ModelParameters,
    ops: &StaticOperators,
    rho: &CMat4,
    c: [f64; 3],
) -> Result<CMat4> {
    check_photon_densities([c[1], c[2]])?;
    Ok(liouvillian_apply_unchecked(p, ops, rho, c))
}

#[inline]
pub(crate) fn liouvillian_apply_unchecked(
    p: &ModelParameters,
    ops: &StaticOperators,
    rho: &CMat4,
    c: [f64; 3],
) -> CMat4 {
    let n = [c[1], c[2]];
    let mut out = dissipator(p, rho, n).map(|z| z * p.epsilon);
    add_minus_i_commutator(p, ops, rho, c[0], n, &mut out);
    out
}

/// Homogeneous right-hand side of the co-state equation,
/// `-i [H, chi] - eps D^dag_n(chi)`.
///
/// This is the negative adjoint of [`liouvillian_apply`], so the pairing
/// `<chi, L(rho)> + <L_b(chi), rho> = 0` holds and `<chi(t), rho(t)>` is
/// conserved along source-free forward/backward trajectories.
pub fn adjoint_liouvillian_apply(
    p: &ModelParameters,
    ops: &StaticOperators,
    chi: &CMat4,
    c: [f64; 3],
) -> Result<CMat4> {
    check_photon_densities([c[1], c[2]])?;
    Ok(adjoint_liouvillian_apply_unchecked(p, ops, chi, c))
}

#[inline]
pub(crate) fn adjoint_liouvillian_apply_unchecked(
    p: &ModelParameters,
    ops: &StaticOperators,
    chi: &CMat4,
    c: [f64; 3],
) -> CMat4 {
    let n = [c[1], c[2]];
    let mut out = dissipator_adjoint(p, chi, n).map(|z| z * (-p.epsilon));
    add_minus_i_commutator(p, ops, chi, c[0], n, &mut out);
    out
}

/// Switching functions `(K^u, K^{n_1}, K^{n_2})`: the derivatives of
/// `<chi, L(rho, c)>` with respect to the three control components.
///
/// `K^u = <chi, -i[V, rho]>` and
/// `K^{n_j} = eps <chi, -i[Lambda_j W_j, rho]
///            + Omega_j (2 s_j^- rho s_j^+ + 2 s_j^+ rho s_j^- - {I, rho})>`.
pub fn switching_functions(
    p: &ModelParameters,
    ops: &StaticOperators,
    chi: &CMat4,
    rho: &CMat4,
) -> Result<[f64; 3]> {
    let raw = switching_functions_raw(p, ops, chi, rho);
    let mut out = [0.0; 3];
    for (slot, z) in out.iter_mut().zip(raw) {
        if z.im.abs() > 1e-9 {
            return Err(Error::NumericalConsistency(format!(
                "switching function has imaginary residue {:.3e}",
                z.im
            )));
        }
        *slot = z.re;
    }
    Ok(out)
}

pub(crate) fn switching_functions_raw(
    p: &ModelParameters,
    ops: &StaticOperators,
    chi: &CMat4,
    rho: &CMat4,
) -> [C64; 3] {
    let minus_i = C64::new(0.0, -1.0);
    let comm_v = (ops.v * rho - rho * ops.v) * minus_i;
    let ku = hs_inner(chi, &comm_v);

    let mut kn = [C64::new(0.0, 0.0); 2];
    for j in 0..2 {
        let mut dir = lower_shuffle(j, rho).map(|z| z * 2.0);
        dir += raise_shuffle(j, rho).map(|z| z * 2.0);
        dir -= rho.map(|z| z * 2.0);
        let mut m = dir.map(|z| z * p.omega_diss[j]);
        for i in 0..4 {
            for k in 0..4 {
                let d = p.lambda_shift[j] * (W_DIAG[j][i] - W_DIAG[j][k]);
                m[(i, k)] += minus_i * d * rho[(i, k)];
            }
        }
        kn[j] = hs_inner(chi, &m) * p.epsilon;
    }
    [ku, kn[0], kn[1]]
}

/// Exact solution of the master equation at zero control for a diagonal
/// initial state `rho_0 = diag(a)`. The state stays diagonal; coherences
/// are identically zero.
pub fn zero_control_solution(p: &ModelParameters, a: &[f64; 4], t: f64) -> Result<DensityMatrix> {
    let sum: f64 = a.iter().sum();
    if a.iter().any(|&x| x < -1e-12) || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "not a probability vector: {a:?} (sum = {sum})"
        )));
    }
    if t < 0.0 {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let g1 = 2.0 * p.epsilon * p.omega_diss[0];
    let g2 = 2.0 * p.epsilon * p.omega_diss[1];
    let e1 = (-g1 * t).exp();
    let e2 = (-g2 * t).exp();
    let e12 = (-(g1 + g2) * t).exp();
    let x1 = a[0] + a[1] - a[1] * e2
        + e12 * ((g1 * t).exp() - 1.0) * (a[2] * (g2 * t).exp() + a[3] * ((g2 * t).exp() - 1.0));
    let x8 = e2 * (a[1] + a[3] - a[3] * e1);
    let x13 = e1 * (a[2] + a[3] - a[3] * e2);
    let x16 = a[3] * e12;
    let mut m = CMat4::zeros();
    for (i, x) in [x1, x8, x13, x16].into_iter().enumerate() {
        m[(i, i)] = C64::new(x, 0.0);
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{hermitize, von_neumann_entropy};
    use crate::test_support::{max_abs, random_hermitian};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    // Straightforward operator-product form of the generator, used as an
    // independent reference for the index-shuffled implementation.
    fn reference_liouvillian(
        p: &ModelParameters,
        ops: &StaticOperators,
        rho: &CMat4,
        c: [f64; 3],
    ) -> CMat4 {
        let [u, n1, n2] = c;
        let mut h = ops.h_free + ops.v.map(|z| z * u);
        h += ops.w[0].map(|z| z * (p.epsilon * p.lambda_shift[0] * n1));
        h += ops.w[1].map(|z| z * (p.epsilon * p.lambda_shift[1] * n2));
        let minus_i = C64::new(0.0, -1.0);
        let mut out = (h * rho - rho * h) * minus_i;
        for (j, nj) in [n1, n2].into_iter().enumerate() {
            let sp = ops.sigma_plus[j];
            let sm = ops.sigma_minus[j];
            let emit = sp * sm;
            let absorb = sm * sp;
            let d = ((sm * rho * sp).map(|z| z * 2.0) - emit * rho - rho * emit)
                .map(|z| z * (p.omega_diss[j] * (nj + 1.0)))
                + ((sp * rho * sm).map(|z| z * 2.0) - absorb * rho - rho * absorb)
                    .map(|z| z * (p.omega_diss[j] * nj));
            out += d.map(|z| z * p.epsilon);
        }
        out
    }

    fn random_controls(rng: &mut impl Rng) -> [f64; 3] {
        [
            4.0 * (rng.gen::<f64>() - 0.5),
            3.0 * rng.gen::<f64>(),
            3.0 * rng.gen::<f64>(),
        ]
    }

    #[test]
    fn operators_match_reference_directions() {
        let mut p = ModelParameters::default();
        p.theta = [PI / 2.0, PI / 2.0];
        p.phi = [0.0, 0.0];
        let ops = StaticOperators::new(&p);
        assert!((ops.q[0] - PAULI_X).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-15);

        p.theta = [0.0, 0.0];
        let ops = StaticOperators::new(&p);
        assert!((ops.q[0] - PAULI_Z).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-15);

        // baseline directions: unit vector (sqrt6/4, sqrt6/4, 1/2) for qubit 1
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let lx = ops.q[0][(0, 1)].re;
        let ly = -ops.q[0][(0, 1)].im;
        let lz = ops.q[0][(0, 0)].re;
        assert!((lx - 0.6123724356957945).abs() < 1e-12);
        assert!((ly - 0.6123724356957945).abs() < 1e-12);
        assert!((lz - 0.5).abs() < 1e-12);
        assert!((lx * lx + ly * ly + lz * lz - 1.0).abs() < 1e-12);
    }

    #[test]
    fn free_hamiltonian_is_diagonal_sum() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let expected = [0.75, 0.25, -0.25, -0.75];
        for i in 0..4 {
            assert_eq!(ops.h_free[(i, i)].re, expected[i]);
            assert_eq!(ops.h_free_diag[i], expected[i]);
        }
        assert!((ops.h_free.trace()).norm() < 1e-15);
    }

    #[test]
    fn ladder_algebra_identities() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        for j in 0..2 {
            let sum = ops.sigma_plus[j] * ops.sigma_minus[j]
                + ops.sigma_minus[j] * ops.sigma_plus[j];
            assert_eq!(sum, CMat4::identity());
            assert_eq!(ops.sigma_plus[j].transpose(), ops.sigma_minus[j]);
        }
    }

    #[test]
    fn optimized_generator_matches_reference() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let rho = random_hermitian(&mut rng);
            let c = random_controls(&mut rng);
            let fast = liouvillian_apply(&p, &ops, &rho, c).unwrap();
            let slow = reference_liouvillian(&p, &ops, &rho, c);
            assert!(max_abs(&(fast - slow)) < 1e-13);
            assert!(fast.trace().norm() < 1e-13);
            assert!(crate::qcore::hermiticity_deviation(&fast) < 1e-12);
        }
    }

    #[test]
    fn ground_state_is_stationary_at_zero_control() {
        let ops_input = [0.0, 0.1];
        for epsilon in ops_input {
            let p = ModelParameters {
                epsilon,
                ..ModelParameters::default()
            };
            let ops = StaticOperators::new(&p);
            let rho = DensityMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
            let d = liouvillian_apply(&p, &ops, rho.matrix(), [0.0; 3]).unwrap();
            assert!(max_abs(&d) < 1e-15);
        }
    }

    #[test]
    fn generator_matches_analytic_derivative_at_zero_control() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let a = [0.25; 4];
        let h = 1e-4;
        let rho = zero_control_solution(&p, &a, h).unwrap();
        let rho0 = zero_control_solution(&p, &a, 0.0).unwrap();
        // one-sided difference at t = 0 (the solution is smooth)
        let fd = (rho.matrix() - rho0.matrix()).map(|z| z / h);
        let gen = liouvillian_apply(&p, &ops, rho0.matrix(), [0.0; 3]).unwrap();
        assert!(max_abs(&(fd - gen)) < 1e-3 * max_abs(&gen).max(1e-3));
    }

    #[test]
    fn negative_photon_density_is_rejected() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let rho = DensityMatrix::maximally_mixed();
        assert!(liouvillian_apply(&p, &ops, rho.matrix(), [0.0, -0.1, 0.0]).is_err());
        assert!(adjoint_liouvillian_apply(&p, &ops, rho.matrix(), [0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn costate_generator_is_negative_adjoint() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..500 {
            let rho = random_hermitian(&mut rng);
            let chi = random_hermitian(&mut rng);
            let c = random_controls(&mut rng);
            let forward = liouvillian_apply(&p, &ops, &rho, c).unwrap();
            let backward = adjoint_liouvillian_apply(&p, &ops, &chi, c).unwrap();
            let lhs = hs_inner(&chi, &forward);
            let rhs = hs_inner(&backward, &rho);
            assert!(
                (lhs + rhs).norm() < 1e-11,
                "pairing violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn dissipator_adjoint_identity_and_unitality() {
        let p = ModelParameters::default();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..500 {
            let rho = random_hermitian(&mut rng);
            let chi = random_hermitian(&mut rng);
            let n = [2.0 * rng.gen::<f64>(), 2.0 * rng.gen::<f64>()];
            let lhs = hs_inner(&chi, &dissipator(&p, &rho, n));
            let rhs = hs_inner(&dissipator_adjoint(&p, &chi, n), &rho);
            assert!((lhs - rhs).norm() < 1e-11);
        }
        // the adjoint of a trace-preserving map kills the identity
        let n = [0.7, 1.3];
        let d = dissipator_adjoint(&p, &CMat4::identity(), n);
        assert!(max_abs(&d) < 1e-14);
    }

    #[test]
    fn free_costate_commutator_vanishes_on_diagonals() {
        let p = ModelParameters {
            epsilon: 0.0,
            ..ModelParameters::default()
        };
        let ops = StaticOperators::new(&p);
        let chi = CMat4::from_diagonal(&nalgebra::Vector4::new(
            C64::new(0.3, 0.0),
            C64::new(-0.2, 0.0),
            C64::new(1.1, 0.0),
            C64::new(0.0, 0.0),
        ));
        let out = adjoint_liouvillian_apply(&p, &ops, &chi, [0.0; 3]).unwrap();
        assert!(max_abs(&out) < 1e-15);
    }

    #[test]
    fn switching_functions_are_control_derivatives() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let h = 1e-5;
        for _ in 0..200 {
            let rho = random_hermitian(&mut rng);
            let chi = random_hermitian(&mut rng);
            let c = [rng.gen::<f64>() - 0.5, 1.0 + rng.gen::<f64>(), 1.0 + rng.gen::<f64>()];
            let k = switching_functions(&p, &ops, &chi, &rho).unwrap();
            for comp in 0..3 {
                let mut cp = c;
                let mut cm = c;
                cp[comp] += h;
                cm[comp] -= h;
                let fp = hs_inner(&chi, &liouvillian_apply(&p, &ops, &rho, cp).unwrap()).re;
                let fm = hs_inner(&chi, &liouvillian_apply(&p, &ops, &rho, cm).unwrap()).re;
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (k[comp] - fd).abs() < 1e-9 * (1.0 + fd.abs()),
                    "component {comp}: K = {}, fd = {fd}",
                    k[comp]
                );
            }
        }
    }

    #[test]
    fn switching_functions_vanish_on_identity_pair() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let iso = CMat4::identity().map(|z| z * 0.25);
        let k = switching_functions(&p, &ops, &iso, &iso).unwrap();
        assert!(k[0].abs() < 1e-14);
    }

    #[test]
    fn switching_functions_reject_complex_residue() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let mut chi = CMat4::zeros();
        chi[(0, 1)] = C64::new(0.0, 1.0); // not Hermitian
        let rho = CMat4::identity().map(|z| z * 0.25) + {
            let mut m = CMat4::zeros();
            m[(0, 1)] = C64::new(0.1, 0.05);
            m[(1, 0)] = C64::new(0.1, -0.05);
            m
        };
        assert!(matches!(
            switching_functions(&p, &ops, &chi, &rho),
            Err(Error::NumericalConsistency(_))
        ));
    }

    #[test]
    fn zero_control_solution_reference_entropies() {
        let p = ModelParameters::default();
        let a = [0.25; 4];
        for (t, expected) in [(50.0, 0.2571), (200.0, 0.0016), (250.0, 0.0003)] {
            let rho = zero_control_solution(&p, &a, t).unwrap();
            let s = von_neumann_entropy(&rho);
            assert!(
                (s - expected).abs() < 5e-4,
                "S(rho({t})) = {s}, expected about {expected}"
            );
        }
        // closed form for the last diagonal entry
        let rho = zero_control_solution(&p, &a, 50.0).unwrap();
        let x16 = rho.matrix()[(3, 3)].re;
        assert!((x16 - 0.25 * (-2.0f64 * 0.1 * 0.8 * 50.0).exp()).abs() < 1e-15);
        assert!((x16 - 8.39e-5).abs() < 1e-7);
    }

    #[test]
    fn zero_coupling_makes_every_diagonal_state_stationary() {
        let p = ModelParameters {
            epsilon: 0.0,
            ..ModelParameters::default()
        };
        let a = [0.5, 0.3, 0.1, 0.1];
        let rho0 = zero_control_solution(&p, &a, 0.0).unwrap();
        for t in [0.5, 5.0, 50.0, 300.0] {
            let rho = zero_control_solution(&p, &a, t).unwrap();
            assert!(max_abs(&(rho.matrix() - rho0.matrix())) < 1e-15);
        }
    }

    #[test]
    fn zero_control_solution_satisfies_the_master_equation() {
        let p = ModelParameters::default();
        let ops = StaticOperators::new(&p);
        let a = [0.25; 4];
        let h = 1e-3;
        let mut t = h;
        while t < 300.0 {
            let plus = zero_control_solution(&p, &a, t + h).unwrap();
            let minus = zero_control_solution(&p, &a, t - h).unwrap();
            let fd = (plus.matrix() - minus.matrix()).map(|z| z / (2.0 * h));
            let here = zero_control_solution(&p, &a, t).unwrap();
            let gen = liouvillian_apply(&p, &ops, here.matrix(), [0.0; 3]).unwrap();
            assert!(max_abs(&(fd - gen)) < 1e-6, "t = {t}");
            t += 7.3;
        }
    }

    #[test]
    fn zero_control_solution_rejects_bad_input() {
        let p = ModelParameters::default();
        assert!(zero_control_solution(&p, &[0.5, 0.5, 0.5, -0.5], 1.0).is_err());
        assert!(zero_control_solution(&p, &[0.25; 4], -1.0).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParameters::default().validate().is_ok());
        let p = ModelParameters {
            epsilon: -0.1,
            ..ModelParameters::default()
        };
        assert!(p.validate().is_err());
        let p = ModelParameters {
            omega_diss: [0.0, 0.6],
            ..ModelParameters::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn hermitize_helper_is_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let m = crate::test_support::random_complex_matrix(&mut rng);
        let h = hermitize(&m);
        assert!(crate::qcore::hermiticity_deviation(&h) < 1e-15);
        assert!(max_abs(&(hermitize(&h) - h)) < 1e-16);
    }
}
