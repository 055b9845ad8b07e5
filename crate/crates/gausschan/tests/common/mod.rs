//! Shared generators for the integration suites.
#![allow(dead_code)]

use gausschan::linalg::{
    complex_from_parts, expm, hermitian_eigenvalues, symplectic_form,
};
use gausschan::{ComplexMatrix, GaussianChannel, Generator, RealMatrix, Tolerance};
use num_complex::Complex64;
use rand::Rng;

pub fn random_channel(rng: &mut impl Rng, modes: usize) -> GaussianChannel {
    let d = 2 * modes;
    let x = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    random_channel_with_x(rng, x)
}

/// Channel with prescribed `X`: noise is `mu I + G G^T` with `mu` the top
/// eigenvalue of `i (sigma - X sigma X^T)`, so complete positivity holds
/// with a strict margin.
pub fn random_channel_with_x(rng: &mut impl Rng, x: RealMatrix) -> GaussianChannel {
    let d = x.nrows();
    let sigma = symplectic_form(d / 2);
    let defect = &sigma - &x * &sigma * x.transpose();
    let witness = complex_from_parts(&RealMatrix::zeros(d, d), &defect);
    let mu = hermitian_eigenvalues(&witness).unwrap().last().copied().unwrap().max(0.0);
    let g = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
    let y = RealMatrix::identity(d, d).scale(mu + rng.random_range(0.1..0.6)) + &g * g.transpose();
    GaussianChannel::new(x, y, Tolerance::default()).expect("constructed channel is CP")
}

/// Channel whose `X` has a nontrivial kernel.
pub fn random_singular_channel(rng: &mut impl Rng, modes: usize) -> GaussianChannel {
    let d = 2 * modes;
    let x0 = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let mut u = nalgebra::DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0f64));
    u /= u.norm();
    let x = x0 * (RealMatrix::identity(d, d) - &u * u.transpose());
    random_channel_with_x(rng, x)
}

pub fn random_symplectic(rng: &mut impl Rng, modes: usize, factors: usize) -> RealMatrix {
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

pub fn random_generator(rng: &mut impl Rng, modes: usize) -> Generator {
    let d = 2 * modes;
    let ga = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-0.7..0.7));
    let a = (&ga - ga.transpose()).scale(0.5);
    let gh = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-0.7..0.7));
    let h = (&gh + gh.transpose()).scale(0.5);
    let gb = RealMatrix::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
    let b0 = &gb * gb.transpose();
    let witness = complex_from_parts(&b0, &a);
    let min = gausschan::linalg::min_eig_hermitian(&witness).unwrap();
    let b = b0 + RealMatrix::identity(d, d).scale((-min).max(0.0) + rng.random_range(0.05..0.3));
    Generator::new(a, b, h, Tolerance::default()).unwrap()
}

pub fn random_hermitian_psd(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    &g * g.adjoint()
}

/// Hermitian with spectrum drawn from `range`, in a random unitary basis.
pub fn random_hermitian_with_spectrum(
    rng: &mut impl Rng,
    dim: usize,
    range: std::ops::Range<f64>,
) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let herm = (&g + g.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
    let eig = nalgebra::SymmetricEigen::new(herm);
    let mut d = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        d[(j, j)] = Complex64::new(rng.random_range(range.clone()), 0.0);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}
