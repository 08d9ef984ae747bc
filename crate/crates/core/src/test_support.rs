//! Random-state generators shared by the unit test suites.

use rand::Rng;

use crate::qcore::{hermitize, DensityMatrix};
use crate::{C64, CMat2, CMat4};

pub(crate) fn random_complex_matrix(rng: &mut impl Rng) -> CMat4 {
    let mut a = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            a[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    a
}

/// Random density matrix `A A^dag / Tr(A A^dag)`.
pub(crate) fn random_density(rng: &mut impl Rng) -> DensityMatrix {
    let a = random_complex_matrix(rng);
    let mut rho = a * a.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    DensityMatrix::new(rho).unwrap()
}

/// Random density matrix bounded away from the boundary of the state space.
pub(crate) fn random_interior_density(rng: &mut impl Rng, mix: f64) -> DensityMatrix {
    let rho = random_density(rng);
    let m = rho.matrix().map(|z| z * (1.0 - mix)) + CMat4::identity().map(|z| z * (mix / 4.0));
    DensityMatrix::new(m).unwrap()
}

pub(crate) fn random_hermitian(rng: &mut impl Rng) -> CMat4 {
    hermitize(&random_complex_matrix(rng))
}

pub(crate) fn random_unitary(rng: &mut impl Rng) -> CMat4 {
    random_complex_matrix(rng).qr().q()
}

pub(crate) fn random_density_2x2(rng: &mut impl Rng) -> CMat2 {
    let mut a = CMat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            a[(i, j)] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    let mut rho = a * a.adjoint();
    rho /= C64::new(rho.trace().re, 0.0);
    rho
}

pub(crate) fn max_abs(m: &CMat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
