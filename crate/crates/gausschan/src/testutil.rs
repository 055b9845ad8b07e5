//! Shared generators for the in-crate test suites.

use rand::Rng;

use crate::channel::GaussianChannel;
use crate::linalg::{
    complex_from_parts, expm, hermitian_eigenvalues, symplectic_form, RealMatrix, Tolerance,
};

/// Random channel: arbitrary `X`, noise lifted to the CP threshold plus a
/// PSD margin.
pub(crate) fn random_channel(rng: &mut impl Rng, modes: usize) -> GaussianChannel {
    let d = 2 * modes;
    let x = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    random_channel_with_x(rng, x)
}

/// Random channel with a prescribed `X`; the noise is `mu I + G G^T` with
/// `mu` the largest eigenvalue of `i (sigma - X sigma X^T)`.
pub(crate) fn random_channel_with_x(rng: &mut impl Rng, x: RealMatrix) -> GaussianChannel {
    let d = x.nrows();
    let sigma = symplectic_form(d / 2);
    let defect = &sigma - &x * &sigma * x.transpose();
    let witness = complex_from_parts(&RealMatrix::zeros(d, d), &defect);
    let mu = hermitian_eigenvalues(&witness).unwrap().last().copied().unwrap().max(0.0);
    let g = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
    let y = RealMatrix::identity(d, d).scale(mu + rng.random_range(0.1..0.6)) + &g * g.transpose();
    GaussianChannel::new(x, y, Tolerance::default()).expect("constructed channel is CP")
}

/// Random symplectic matrix: a product of up to two exponentials of
/// Hamiltonian matrices `sigma K`, `K` symmetric.
pub(crate) fn random_symplectic(rng: &mut impl Rng, modes: usize, factors: usize) -> RealMatrix {
    let d = 2 * modes;
    let sigma = symplectic_form(modes);
    let mut s = RealMatrix::identity(d, d);
    for _ in 0..factors.max(1) {
        let g = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-0.6..0.6));
        let k = (&g + g.transpose()).scale(0.5);
        s = s * expm(&(&sigma * k)).unwrap();
    }
    s
}

/// Random gauge channel in hat form: arbitrary complex `x^`, noise inflated
/// past both signs of `I - x^ x^*`.
pub(crate) fn random_gauge_channel(
    rng: &mut impl Rng,
    modes: usize,
) -> crate::gauge::GaugeChannel {
    use crate::linalg::{spectral_norm_c, ComplexMatrix};
    use num_complex::Complex64;
    let n = modes;
    let x_hat = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8))
    });
    let defect = ComplexMatrix::identity(n, n) - &x_hat * x_hat.adjoint();
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))
    });
    let lift = spectral_norm_c(&defect) + rng.random_range(0.05..0.5);
    let y_hat = ComplexMatrix::identity(n, n).map(|z| z * Complex64::new(lift, 0.0)) + &g * g.adjoint();
    crate::gauge::GaugeChannel::new(x_hat, y_hat, Tolerance::default()).unwrap()
}
