//! Simulation and optimal control of the von Neumann entropy of an open
//! two-qubit system driven by a scalar coherent field and two incoherent
//! photon densities.
//!
//! The crate is organized around a GKSL-type master equation whose generator
//! couples a coherent control `u(t)` through an interaction Hamiltonian and
//! two incoherent controls `n_1(t), n_2(t)` through both a Lamb-shift term
//! and the dissipator rates:
//!
//! - [`qcore`] — dense Hermitian 4x4 / 2x2 kernel: entropy, clamped matrix
//!   logarithm, partial trace, Bloch vectors, purity, distances, and the
//!   16-component real coordinate view of a density matrix.
//! - [`model`] — the controlled generator: Hamiltonians, dissipator, the
//!   co-state generator, switching functions, and the exact zero-control
//!   solution used as an analytic oracle.
//! - [`controls`] — piecewise-linear control signals on a uniform grid, box
//!   projection, genome encoding for the genetic algorithm, regularizers.
//! - [`dynamics`] — fixed-step RK4 propagation of the state forward and of
//!   the co-state backward, with dense trajectory storage.
//! - [`objectives`] — the entropy objective functionals, their breakdown
//!   into terminal/penalty/regularization terms, and stopping criteria.
//! - [`gradient`] — adjoint-state gradient assembly, a finite-difference
//!   oracle, and the projected-stationarity residual.
//! - [`optim`] — one- and two-step projected gradient methods and a
//!   real-coded genetic algorithm.

pub mod controls;
pub mod dynamics;
pub mod error;
pub mod gradient;
pub mod model;
pub mod objectives;
pub mod optim;
pub mod qcore;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex 2x2 matrix (single-qubit operators).
pub type CMat2 = nalgebra::Matrix2<C64>;
/// Dense complex 4x4 matrix (two-qubit operators).
pub type CMat4 = nalgebra::Matrix4<C64>;
