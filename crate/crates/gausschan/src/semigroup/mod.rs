//! One-parameter Gaussian semigroups: generators, evolution, the simple-form
//! representation, bounded noise and invariant states, embeddability tests
//! and infinitesimal-divisibility constructions.
//!
//! A generator is a triple `(A, B, H)` of real `2n x 2n` matrices with `A`
//! antisymmetric, `B`, `H` symmetric and `i A + B >= 0`; it generates
//! `X_t = e^{t (A - H) sigma}` and `Y_t = 2 int_0^t X_s^T sigma^T B sigma
//! X_s ds`.

use thiserror::Error;

use crate::channel::{ChannelError, GaussianChannel};
use crate::linalg::{
    complex_from_parts, expm, psd_check, spectral_norm, symplectic_form, vanloan_noise_integral,
    ComplexMatrix, LinalgError, RealMatrix, Tolerance,
};

mod embed;
mod infdiv;
mod simple_form;

pub use embed::{embeddable_x, in_exp_sp, split_exp_sp, EmbeddabilityVerdict};
pub use infdiv::{infdiv_construct, infdiv_monotone, infdiv_necessary};
pub use simple_form::{bounded_noise_check, invariant_state, simple_form, SimpleForm};

/// Errors from semigroup analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemigroupError {
    #[error("generator violates its structure constraints: {0}")]
    InvalidGenerator(String),
    #[error("i A + B is not positive semidefinite")]
    NotPsd,
    #[error("matrix is not symplectic within tolerance")]
    NotSymplectic,
    #[error("determinant is not positive; no infinitesimal divisible construction")]
    NonPositiveDeterminant,
    #[error("noise comparison failed: replacement is not >= the original noise")]
    NotGreaterNoise,
    #[error("verdict is indeterminate: {0}")]
    Indeterminate(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Generator `(A, B, H)` of a one-parameter semigroup of Gaussian channels.
#[derive(Debug, Clone)]
pub struct Generator {
    modes: usize,
    a: RealMatrix,
    b: RealMatrix,
    h: RealMatrix,
}

impl Generator {
    pub fn new(
        a: RealMatrix,
        b: RealMatrix,
        h: RealMatrix,
        tol: Tolerance,
    ) -> Result<Self, SemigroupError> {
        let d = a.nrows();
        if a.ncols() != d || b.shape() != (d, d) || h.shape() != (d, d) || d == 0 || !d.is_multiple_of(2) {
            return Err(SemigroupError::InvalidGenerator(format!(
                "matrices must share one positive even square dimension, got a: {}x{}, b: {}x{}, h: {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        for (m, name) in [(&a, "a"), (&b, "b"), (&h, "h")] {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(SemigroupError::InvalidGenerator(format!("{name} has non-finite entries")));
            }
        }
        if (&a + a.transpose()).norm() > tol.band(spectral_norm(&a).max(1.0)) {
            return Err(SemigroupError::InvalidGenerator("a must be antisymmetric".into()));
        }
        if (&b - b.transpose()).norm() > tol.band(spectral_norm(&b).max(1.0)) {
            return Err(SemigroupError::InvalidGenerator("b must be symmetric".into()));
        }
        if (&h - h.transpose()).norm() > tol.band(spectral_norm(&h).max(1.0)) {
            return Err(SemigroupError::InvalidGenerator("h must be symmetric".into()));
        }
        let witness = complex_from_parts(&b, &a);
        if !psd_check(&witness, tol)? {
            return Err(SemigroupError::NotPsd);
        }
        Ok(Generator { modes: d / 2, a, b, h })
    }

    /// The attenuation semigroup `X_t = e^{-t} I`, `Y_t = (1 - e^{-2t}) I`:
    /// `(A, B, H) = (sigma, I, 0)`.
    pub fn attenuation(modes: usize) -> Self {
        let d = 2 * modes;
        Generator {
            modes,
            a: symplectic_form(modes),
            b: RealMatrix::identity(d, d),
            h: RealMatrix::zeros(d, d),
        }
    }

    /// The amplification semigroup `X_t = e^{t} I`, `Y_t = (e^{2t} - 1) I`:
    /// `(A, B, H) = (-sigma, I, 0)`.
    pub fn amplification(modes: usize) -> Self {
        let d = 2 * modes;
        Generator {
            modes,
            a: -symplectic_form(modes),
            b: RealMatrix::identity(d, d),
            h: RealMatrix::zeros(d, d),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    pub fn h(&self) -> &RealMatrix {
        &self.h
    }

    /// Drift `sigma (A + H)` of the moment evolution.
    ///
    /// Derived from the Lindblad form: for `H^ = 1/2 sum H_kl R_k R_l` and
    /// `L^_a = sum L_ak R_k` with `L* L = B + i A`, the first moments obey
    /// `d<R>/dt = sigma (A + H) <R>`. With this drift the family
    /// `X_t = e^{t f}`, `Y_t = 2 int_0^t X_s sigma^T B sigma X_s^T ds`
    /// satisfies the semigroup law and is completely positive for all `t`
    /// exactly when `i A + B >= 0`:
    /// `d/ds [Y_s + i(X_s sigma X_s^T - sigma)] = 2 (X_s sigma)(B - iA)(X_s sigma)*`.
    pub fn drift(&self) -> RealMatrix {
        symplectic_form(self.modes) * (&self.a + &self.h)
    }

    /// Instantaneous noise rate `B~ = 2 sigma^T B sigma`.
    pub fn noise_rate(&self) -> RealMatrix {
        let sigma = symplectic_form(self.modes);
        (sigma.transpose() * &self.b * &sigma).scale(2.0)
    }

    /// Evolve for time `t >= 0`.
    pub fn evolve(&self, t: f64) -> Result<GaussianChannel, SemigroupError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(SemigroupError::InvalidGenerator(format!(
                "evolution time must be finite and nonnegative, got {t}"
            )));
        }
        let f = self.drift();
        let x = expm(&f.scale(t))?;
        // The integral runs over X_s C X_s^T; the Van Loan kernel is
        // e^{s f^T} C e^{s f}, so pass the transposed drift.
        let y = vanloan_noise_integral(&f.transpose(), &self.noise_rate(), t, Tolerance::default())?;
        Ok(GaussianChannel::from_parts_unchecked(x, y))
    }

    /// Quadratic Hamiltonian coefficients and Lindblad coefficient vectors:
    /// `H` as-is and `L` with `L* L = B + i A`, rows from the scaled
    /// eigenvectors of the Hermitian PSD matrix `B + i A`.
    pub fn lindblad_export(&self) -> Result<(RealMatrix, ComplexMatrix), SemigroupError> {
        let f = complex_from_parts(&self.b, &self.a);
        let eig = nalgebra::SymmetricEigen::new(f.clone());
        let d = 2 * self.modes;
        let mut l = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            let lam = eig.eigenvalues[j];
            if lam < -1e-9 * spectral_norm(&self.b).max(1.0) {
                return Err(SemigroupError::NotPsd);
            }
            let s = lam.max(0.0).sqrt();
            for k in 0..d {
                l[(j, k)] = eig.eigenvectors[(k, j)].conj() * s;
            }
        }
        let back = l.adjoint() * &l;
        if (&back - &f).norm() > 1e-9 * f.norm().max(1.0) {
            return Err(SemigroupError::Indeterminate(
                "Lindblad factorization residual above bound".into(),
            ));
        }
        Ok((self.h.clone(), l))
    }

    /// Check the two semigroup laws at `(t, s)`:
    /// `evolve(t) . evolve(s) = evolve(t + s)` within tolerance.
    pub fn semigroup_law_check(&self, t: f64, s: f64, tol: Tolerance) -> Result<bool, SemigroupError> {
        let ct = self.evolve(t)?;
        let cs = self.evolve(s)?;
        let cts = self.evolve(t + s)?;
        let composed = ct.compose(&cs)?;
        let scale = cts.x().norm().max(cts.y().norm()).max(1.0);
        Ok((composed.x() - cts.x()).norm() <= tol.band(scale)
            && (composed.y() - cts.y()).norm() <= tol.band(scale))
    }
}

/// Split `sigma^T L = A + H` into the antisymmetric and symmetric parts, so
/// that a generator with these `(A, H)` has drift `sigma (A + H) = L`.
pub(crate) fn hamiltonian_split(log: &RealMatrix, modes: usize) -> (RealMatrix, RealMatrix) {
    let g = symplectic_form(modes).transpose() * log;
    let a = (&g - g.transpose()).scale(0.5);
    let h = (&g + g.transpose()).scale(0.5);
    (a, h)
}

/// Max row sum norm, the `B = ||A||_inf I` default for witness generators.
pub(crate) fn inf_norm(m: &RealMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
