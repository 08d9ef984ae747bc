//! Dense Hermitian matrix kernel: von Neumann entropy, clamped matrix
//! logarithm, partial trace and Bloch vectors, purity, Hilbert-Schmidt
//! distance, and the 16-component real coordinate view of a 4x4 state.
//!
//! All eigendecompositions symmetrize their input as `(m + m^dag)/2` first
//! and use a Hermitian solver; eigenvalues below [`EIGENVALUE_FLOOR`] are
//! treated as exactly zero by the entropy and clamped to the floor by the
//! logarithm, so that `0 log 0 = 0` and the adjoint source stays finite near
//! the boundary of the state space.

use nalgebra::{SymmetricEigen, Vector4};

use crate::{error::Error, C64, CMat2, CMat4, Result};

/// Eigenvalues at or below this floor are treated as zero (entropy) or
/// clamped to the floor (matrix logarithm).
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Elementwise Hermiticity tolerance for state validation.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Tolerance on `|Tr rho - 1|` for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

/// A density matrix is accepted when its smallest eigenvalue is above
/// `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-10;

/// Natural log of the entropy upper bound for a four-level system.
pub const MAX_ENTROPY: f64 = 1.3862943611198906; // log 4

/// `(m + m^dag) / 2`.
pub fn hermitize(m: &CMat4) -> CMat4 {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Largest elementwise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_deviation(m: &CMat4) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Hilbert-Schmidt inner product `Tr(a^dag b)`.
pub fn hs_inner(a: &CMat4, b: &CMat4) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += a[(j, i)].conj() * b[(j, i)];
        }
    }
    acc
}

/// Eigenvalues of a Hermitian matrix (input symmetrized first).
pub fn hermitian_eigenvalues(m: &CMat4) -> Vector4<f64> {
    hermitize(m).symmetric_eigenvalues()
}

/// Full Hermitian eigendecomposition (input symmetrized first).
pub fn hermitian_eigen(m: &CMat4) -> (Vector4<f64>, CMat4) {
    let se = SymmetricEigen::new(hermitize(m));
    (se.eigenvalues, se.eigenvectors)
}

/// A 4x4 density matrix: Hermitian, unit trace, positive semidefinite.
///
/// Construction validates all three invariants; the stored matrix is the
/// symmetrized input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: CMat4,
}

impl DensityMatrix {
    /// Validate and wrap a matrix as a state.
    pub fn new(m: CMat4) -> Result<Self> {
        let deviation = hermiticity_deviation(&m);
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let m = hermitize(&m);
        let trace = m.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let min_eigenvalue = hermitian_eigenvalues(&m).min();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { m })
    }

    /// Wrap a matrix that is known valid (solver output, exact formulas).
    pub(crate) fn from_matrix_unchecked(m: CMat4) -> Self {
        Self { m }
    }

    /// Diagonal state from a probability 4-vector.
    pub fn from_diagonal(p: &[f64; 4]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if p.iter().any(|&x| x < -TRACE_TOL) || (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::domain(format!(
                "not a probability vector: {p:?} (sum = {sum})"
            )));
        }
        let mut m = CMat4::zeros();
        for i in 0..4 {
            m[(i, i)] = C64::new(p[i], 0.0);
        }
        Ok(Self { m })
    }

    /// The maximally mixed state `I/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            m: CMat4::identity().map(|z| z * 0.25),
        }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.m
    }

    pub fn into_matrix(self) -> CMat4 {
        self.m
    }
}

/// A co-state (adjoint variable): Hermitian, but with no trace or
/// positivity constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoState {
    m: CMat4,
}

impl CoState {
    pub fn new(m: CMat4) -> Result<Self> {
        let deviation = hermiticity_deviation(&m);
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { m: hermitize(&m) })
    }

    pub fn zero() -> Self {
        Self { m: CMat4::zeros() }
    }

    pub(crate) fn from_matrix_unchecked(m: CMat4) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.m
    }

    pub fn into_matrix(self) -> CMat4 {
        self.m
    }
}

/// Entropy of a Hermitian PSD matrix given as raw storage.
///
/// Used on trajectory nodes where validity is guaranteed by the solver.
pub(crate) fn entropy_raw(m: &CMat4) -> f64 {
    let ev = hermitian_eigenvalues(m);
    let mut s = 0.0;
    for &lambda in ev.iter() {
        if lambda > EIGENVALUE_FLOOR {
            s -= lambda * lambda.ln();
        }
    }
    s.max(0.0)
}

/// Von Neumann entropy `S(rho) = -Tr(rho log rho)` in nats.
///
/// Eigenvalues at or below [`EIGENVALUE_FLOOR`] contribute zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_raw(rho.matrix())
}

/// Matrix logarithm with eigenvalues clamped at [`EIGENVALUE_FLOOR`].
pub fn matrix_log_clamped(m: &CMat4) -> CMat4 {
    let (ev, vecs) = hermitian_eigen(m);
    let logd = CMat4::from_diagonal(&Vector4::from_iterator(
        ev.iter().map(|&l| C64::new(l.max(EIGENVALUE_FLOOR).ln(), 0.0)),
    ));
    hermitize(&(vecs * logd * vecs.adjoint()))
}

/// Derivative of the entropy with respect to the state, `-log rho - I`,
/// with the clamped logarithm.
pub fn entropy_derivative(rho: &DensityMatrix) -> CMat4 {
    -(matrix_log_clamped(rho.matrix()) + CMat4::identity())
}

/// Degree of purity `Tr rho^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    purity_raw(rho.matrix())
}

pub(crate) fn purity_raw(m: &CMat4) -> f64 {
    hs_inner(m, m).re
}

/// Linear entropy `1 - Tr rho^2`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}

/// Hilbert-Schmidt distance `[Tr (a - b)^2]^{1/2}` between Hermitian
/// matrices.
pub fn hs_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    hs_distance_raw(a.matrix(), b.matrix())
}

pub(crate) fn hs_distance_raw(a: &CMat4, b: &CMat4) -> f64 {
    let d = a - b;
    hs_inner(&d, &d).re.max(0.0).sqrt()
}

/// Which qubit a reduction keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    One,
    Two,
}

/// A single-qubit reduced state together with its Bloch vector.
#[derive(Debug, Clone, Copy)]
pub struct QubitReduction {
    /// Reduced 2x2 density matrix.
    pub reduced: CMat2,
    /// Bloch vector `(r_x, r_y, r_z)`, `|r| <= 1`.
    pub bloch: [f64; 3],
}

impl QubitReduction {
    /// Entropy of the reduced state, from the exact 2x2 spectrum
    /// `(1 +- |r|)/2`.
    pub fn entropy(&self) -> f64 {
        let r = self.bloch;
        let rn = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt().min(1.0);
        let mut s = 0.0;
        for lambda in [(1.0 + rn) / 2.0, (1.0 - rn) / 2.0] {
            if lambda > EIGENVALUE_FLOOR {
                s -= lambda * lambda.ln();
            }
        }
        s.max(0.0)
    }
}

/// Partial trace over the complementary qubit, with the Bloch view.
///
/// Basis ordering is `|q1 q2>` with index `2*q1 + q2`.
pub fn partial_trace(rho: &DensityMatrix, keep: Qubit) -> QubitReduction {
    let m = rho.matrix();
    let mut r = CMat2::zeros();
    match keep {
        Qubit::One => {
            for a in 0..2 {
                for b in 0..2 {
                    r[(a, b)] = m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)];
                }
            }
        }
        Qubit::Two => {
            for a in 0..2 {
                for b in 0..2 {
                    r[(a, b)] = m[(a, b)] + m[(a + 2, b + 2)];
                }
            }
        }
    }
    let bloch = [
        2.0 * r[(0, 1)].re,
        -2.0 * r[(0, 1)].im,
        (r[(0, 0)] - r[(1, 1)]).re,
    ];
    QubitReduction { reduced: r, bloch }
}

/// Real coordinate view of the state: the 16 independent real parameters
/// `(rho_11, Re rho_12, Im rho_12, ..., rho_44)` read along the upper
/// triangle row by row.
pub fn real_coordinates(rho: &DensityMatrix) -> [f64; 16] {
    let m = rho.matrix();
    [
        m[(0, 0)].re,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(0, 2)].re,
        m[(0, 2)].im,
        m[(0, 3)].re,
        m[(0, 3)].im,
        m[(1, 1)].re,
        m[(1, 2)].re,
        m[(1, 2)].im,
        m[(1, 3)].re,
        m[(1, 3)].im,
        m[(2, 2)].re,
        m[(2, 3)].re,
        m[(2, 3)].im,
        m[(3, 3)].re,
    ]
}

/// Inverse of [`real_coordinates`]. Rejects coordinate vectors whose
/// reconstruction violates the state invariants.
pub fn density_from_coordinates(x: &[f64; 16]) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix_from_coordinates(x))
}

/// Hermitian matrix built from the 16 real coordinates (no state checks).
pub fn matrix_from_coordinates(x: &[f64; 16]) -> CMat4 {
    let c = |re: f64, im: f64| C64::new(re, im);
    let mut m = CMat4::zeros();
    m[(0, 0)] = c(x[0], 0.0);
    m[(0, 1)] = c(x[1], x[2]);
    m[(0, 2)] = c(x[3], x[4]);
    m[(0, 3)] = c(x[5], x[6]);
    m[(1, 1)] = c(x[7], 0.0);
    m[(1, 2)] = c(x[8], x[9]);
    m[(1, 3)] = c(x[10], x[11]);
    m[(2, 2)] = c(x[12], 0.0);
    m[(2, 3)] = c(x[13], x[14]);
    m[(3, 3)] = c(x[15], 0.0);
    for i in 0..4 {
        for j in (i + 1)..4 {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    m
}
