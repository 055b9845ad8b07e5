//! The p-map onto the cone of Hermitian positive matrices and the
//! divisibility construction built on it.
//!
//! `p(X, Y) = i (X sigma X^T - sigma) + Y` is nonnegative exactly on valid
//! channels, vanishes exactly on reversible channels, and every Hermitian
//! PSD matrix is hit by some channel. Two channels share a p-image iff they
//! have equal noise and equal `X sigma X^T`, i.e. differ by a right
//! symplectic factor.

use num_complex::Complex64;

use crate::linalg::{
    antisym_factor, complex_from_parts, im_part, min_eig_hermitian, psd_check, re_part,
    spectral_norm_c, symplectic_form, ComplexMatrix, RealMatrix, Tolerance,
};

use super::{ChannelError, GaussianChannel};

/// Hermitian PSD representative of a channel's equivalence class under the
/// p-map.
#[derive(Debug, Clone)]
pub struct PositiveClassRep {
    modes: usize,
    p: ComplexMatrix,
}

impl PositiveClassRep {
    /// Wrap a Hermitian PSD matrix of even dimension.
    pub fn new(p: ComplexMatrix, tol: Tolerance) -> Result<Self, ChannelError> {
        if p.nrows() != p.ncols() || p.nrows() == 0 || !p.nrows().is_multiple_of(2) {
            return Err(ChannelError::DimensionMismatch(format!(
                "class representative must be square of even dimension, got {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        let herm_dev = (&p - p.adjoint()).norm();
        if herm_dev > tol.band(spectral_norm_c(&p).max(1.0)) {
            return Err(ChannelError::NotSymmetric);
        }
        if !psd_check(&p, tol)? {
            return Err(ChannelError::NotPsd);
        }
        let p = (&p + p.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
        Ok(PositiveClassRep { modes: p.nrows() / 2, p })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn norm(&self) -> f64 {
        spectral_norm_c(&self.p)
    }
}

pub(crate) fn p_map(c: &GaussianChannel) -> PositiveClassRep {
    let sigma = symplectic_form(c.modes());
    let im = c.x() * &sigma * c.x().transpose() - &sigma;
    PositiveClassRep { modes: c.modes(), p: complex_from_parts(c.y(), &im) }
}

/// Construct a channel with a prescribed p-image: `Y = Re(P)` and `X` from
/// the antisymmetric factorization `Im(P) + sigma = X sigma X^T`.
///
/// The representative is unique only up to a right symplectic factor; this
/// construction is deterministic but callers comparing channels should
/// compare p-images, not `X`.
pub fn channel_from_positive(
    p: &PositiveClassRep,
    tol: Tolerance,
) -> Result<GaussianChannel, ChannelError> {
    let y = re_part(&p.p);
    let im = im_part(&p.p);
    let sigma = symplectic_form(p.modes);
    let x = antisym_factor(&(&im + &sigma), tol)?;
    let c = GaussianChannel::from_parts_unchecked(x, y);
    let back = p_map(&c);
    let resid = (&back.p - &p.p).norm();
    if resid > 1e-8 * spectral_norm_c(&p.p).max(1.0) {
        return Err(ChannelError::NumericalFailure(format!(
            "p-map round trip residual {resid} above bound"
        )));
    }
    Ok(c)
}

/// A non-trivial division of a channel into two non-reversible factors.
#[derive(Debug, Clone)]
pub struct Division {
    pub left: GaussianChannel,
    pub right: GaussianChannel,
    pub epsilon: Option<f64>,
    pub used_kernel_branch: bool,
}

impl Division {
    /// Composition residual against a target channel.
    pub fn residual(&self, target: &GaussianChannel) -> f64 {
        let composed = self.left.compose(&self.right).expect("factors share the mode count");
        (composed.x() - target.x()).norm() + (composed.y() - target.y()).norm()
    }
}

/// Divide a non-reversible channel into two non-reversible factors.
///
/// Singular `X`: `(X, Y) = (X, Y) . (I, Pi_ker)` with the orthogonal
/// projector onto `ker X` as added noise. Nonsingular `X`: scale the p-image
/// by `eps`, rebuild a left factor `(X_1, eps Y)` from it, and take the
/// exact right complement `(X_1^{-1} X, (1 - eps) X_1^{-1} Y X_1^{-T})`,
/// whose p-image is `(1 - eps) X_1^{-1} P X_1^{-T}`. The `eps` search walks
/// `1/2, 1/4, ...` until `X_1` is nonsingular.
pub(crate) fn divide(
    c: &GaussianChannel,
    tol: Tolerance,
    epsilon: Option<f64>,
) -> Result<Division, ChannelError> {
    if c.is_reversible(tol) {
        return Err(ChannelError::Reversible);
    }
    let d = 2 * c.modes();
    let sv = c.x().clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));

    if smin <= tol.band(smax) {
        // Kernel branch: right factor adds the kernel projector as noise,
        // which the left factor annihilates.
        let ker = crate::linalg::kernel_onb(c.x(), tol);
        let proj = &ker * ker.transpose();
        let left = c.clone();
        let right = GaussianChannel::from_parts_unchecked(RealMatrix::identity(d, d), proj);
        let division =
            Division { left, right, epsilon: None, used_kernel_branch: true };
        return Ok(division);
    }

    let p = p_map(c);
    let candidates: Vec<f64> = match epsilon {
        Some(e) => {
            if !(e.is_finite() && e > 0.0 && e < 1.0) {
                return Err(ChannelError::NumericalFailure(format!(
                    "epsilon must lie in (0, 1), got {e}"
                )));
            }
            vec![e]
        }
        None => (1..=20).map(|k| 0.5f64.powi(k)).collect(),
    };

    let sigma = symplectic_form(c.modes());
    for eps in candidates {
        let im_scaled = im_part(&p.p).scale(eps) + &sigma;
        let x1 = match antisym_factor(&im_scaled, tol) {
            Ok(x1) => x1,
            Err(_) => continue,
        };
        let sv1 = x1.clone().singular_values();
        let s1max = sv1.iter().fold(0.0f64, |a, &b| a.max(b));
        let s1min = sv1.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if s1min <= (tol.band(s1max)).max(1e-6 * s1max) {
            continue;
        }
        let x1_inv = match x1.clone().try_inverse() {
            Some(inv) => inv,
            None => continue,
        };
        let y1 = c.y().scale(eps);
        let x2 = &x1_inv * c.x();
        let y2 = (&x1_inv * c.y() * x1_inv.transpose()).scale(1.0 - eps);
        let left = GaussianChannel::from_parts_unchecked(x1, y1);
        let right = GaussianChannel::from_parts_unchecked(x2, y2);
        if left.is_reversible(tol) || right.is_reversible(tol) {
            // Cannot happen for a non-reversible CP input; be loud if the
            // numerics disagree.
            return Err(ChannelError::NumericalFailure(
                "division produced a reversible factor".into(),
            ));
        }
        let division = Division { left, right, epsilon: Some(eps), used_kernel_branch: false };
        let resid = division.residual(c);
        if resid > 1e-8 * c.y().norm().max(1.0) {
            return Err(ChannelError::NumericalFailure(format!(
                "division composition residual {resid} above bound"
            )));
        }
        return Ok(division);
    }
    Err(ChannelError::NumericalFailure(
        "epsilon search exhausted without a nonsingular left factor".into(),
    ))
}

/// Norm certificate that the p-image vanishes, used by reversibility
/// cross-checks.
pub fn p_map_norm(c: &GaussianChannel) -> f64 {
    p_map(c).norm()
}

/// `min_eig` certificate for a class representative.
pub fn class_min_eig(p: &PositiveClassRep) -> f64 {
    min_eig_hermitian(&p.p).unwrap_or(f64::NEG_INFINITY)
}
