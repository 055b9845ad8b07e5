//! Gauge-covariant channels: the subsemigroup of pairs commuting with the
//! symplectic form, isomorphic via the hat map to complex `n x n` matrix
//! pairs.
//!
//! In the block ordering `(q_1..q_n, p_1..p_n)` a matrix commuting with
//! `sigma = [[0, I], [-I, 0]]` has the form `[[A, B], [-B, A]]`; the hat map
//! sends it to `A + i B`, a *-algebra isomorphism with `sigma^ = i I`. The
//! complete-positivity constraint becomes `Y^ >= +-(I - X^ X^*)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{ChannelError, GaussianChannel};
use crate::linalg::{
    complex_from_parts, im_part, psd_check, re_part, spectral_norm, spectral_norm_c,
    symplectic_form, ComplexMatrix, LinalgError, RealMatrix, Tolerance,
};

mod classify;

pub use classify::{
    classify, gauge_semigroup_membership, polar_split, GaugeBlock, GaugeCase, GaugeClassification,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("channel is not gauge-covariant: {0}")]
    NotGaugeCovariant(String),
    #[error("hat pair violates complete positivity")]
    NotCp,
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Permutation matrix from interleaved `(q_1, p_1, ...)` to block
/// `(q_1..q_n, p_1..p_n)` ordering: `v_block = P v_inter`.
pub fn block_ordering_permutation(modes: usize) -> RealMatrix {
    let d = 2 * modes;
    let mut p = RealMatrix::zeros(d, d);
    for j in 0..modes {
        p[(j, 2 * j)] = 1.0;
        p[(modes + j, 2 * j + 1)] = 1.0;
    }
    p
}

/// Does the channel commute with the symplectic form?
pub fn is_gauge_covariant(c: &GaussianChannel, tol: Tolerance) -> bool {
    let sigma = symplectic_form(c.modes());
    let xc = c.x() * &sigma - &sigma * c.x();
    let yc = c.y() * &sigma - &sigma * c.y();
    xc.norm() <= tol.band(spectral_norm(c.x()).max(1.0))
        && yc.norm() <= tol.band(spectral_norm(c.y()).max(1.0))
}

/// Hat image of a real matrix commuting with `sigma`: permute to block
/// ordering, read `[[A, B], [-B, A]]`, return `A + i B`.
pub fn hat_matrix(m: &RealMatrix, tol: Tolerance) -> Result<ComplexMatrix, GaugeError> {
    let d = m.nrows();
    if m.ncols() != d || d == 0 || !d.is_multiple_of(2) {
        return Err(GaugeError::DimensionMismatch(format!(
            "expected square even dimension, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = d / 2;
    let p = block_ordering_permutation(n);
    let blocked = &p * m * p.transpose();
    let a = blocked.view((0, 0), (n, n)).into_owned();
    let b = blocked.view((0, n), (n, n)).into_owned();
    let a2 = blocked.view((n, n), (n, n)).into_owned();
    let b2 = blocked.view((n, 0), (n, n)).into_owned();
    let resid = (&a2 - &a).norm() + (&b2 + &b).norm();
    if resid > tol.band(spectral_norm(m).max(1.0)) {
        return Err(GaugeError::NotGaugeCovariant(format!(
            "block structure residual {resid:.3e}"
        )));
    }
    Ok(complex_from_parts(&a, &b))
}

/// Inverse of [`hat_matrix`]: rebuild `[[Re, Im], [-Im, Re]]` and permute
/// back to interleaved ordering.
pub fn unhat_matrix(z: &ComplexMatrix) -> RealMatrix {
    let n = z.nrows();
    debug_assert_eq!(n, z.ncols());
    let a = re_part(z);
    let b = im_part(z);
    let mut blocked = RealMatrix::zeros(2 * n, 2 * n);
    blocked.view_mut((0, 0), (n, n)).copy_from(&a);
    blocked.view_mut((0, n), (n, n)).copy_from(&b);
    blocked.view_mut((n, 0), (n, n)).copy_from(&(-&b));
    blocked.view_mut((n, n), (n, n)).copy_from(&a);
    let p = block_ordering_permutation(n);
    p.transpose() * blocked * p
}

/// A gauge-covariant channel in hat form: `x^` arbitrary complex, `y^`
/// Hermitian, complete positivity `y^ >= +-(I - x^ x^*)`.
#[derive(Debug, Clone)]
pub struct GaugeChannel {
    modes: usize,
    x_hat: ComplexMatrix,
    y_hat: ComplexMatrix,
}

impl GaugeChannel {
    pub fn new(
        x_hat: ComplexMatrix,
        y_hat: ComplexMatrix,
        tol: Tolerance,
    ) -> Result<Self, GaugeError> {
        let n = x_hat.nrows();
        if x_hat.ncols() != n || y_hat.nrows() != n || y_hat.ncols() != n || n == 0 {
            return Err(GaugeError::DimensionMismatch(format!(
                "hat matrices must be square of one dimension, got {}x{} and {}x{}",
                x_hat.nrows(),
                x_hat.ncols(),
                y_hat.nrows(),
                y_hat.ncols()
            )));
        }
        if (&y_hat - y_hat.adjoint()).norm() > tol.band(spectral_norm_c(&y_hat).max(1.0)) {
            return Err(GaugeError::NotHermitian);
        }
        let y_hat = (&y_hat + y_hat.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
        let defect = ComplexMatrix::identity(n, n) - &x_hat * x_hat.adjoint();
        let plus = &y_hat - &defect;
        let minus = &y_hat + &defect;
        if !psd_check(&plus, tol)? || !psd_check(&minus, tol)? {
            return Err(GaugeError::NotCp);
        }
        Ok(GaugeChannel { modes: n, x_hat, y_hat })
    }

    pub(crate) fn from_parts_unchecked(x_hat: ComplexMatrix, y_hat: ComplexMatrix) -> Self {
        let modes = x_hat.nrows();
        let y_hat = (&y_hat + y_hat.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
        GaugeChannel { modes, x_hat, y_hat }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn x_hat(&self) -> &ComplexMatrix {
        &self.x_hat
    }

    pub fn y_hat(&self) -> &ComplexMatrix {
        &self.y_hat
    }

    /// Hat-side semigroup product `(x1 x2, y1 + x1 y2 x1*)`.
    pub fn compose(&self, other: &GaugeChannel) -> Result<GaugeChannel, GaugeError> {
        if self.modes != other.modes {
            return Err(GaugeError::DimensionMismatch(format!(
                "cannot compose gauge channels on {} and {} modes",
                self.modes, other.modes
            )));
        }
        let x = &self.x_hat * &other.x_hat;
        let y = &self.y_hat + &self.x_hat * &other.y_hat * self.x_hat.adjoint();
        Ok(GaugeChannel::from_parts_unchecked(x, y))
    }
}

/// Hat image of a gauge-covariant channel.
pub fn hat(c: &GaussianChannel, tol: Tolerance) -> Result<GaugeChannel, GaugeError> {
    if !is_gauge_covariant(c, tol) {
        return Err(GaugeError::NotGaugeCovariant(
            "X or Y does not commute with sigma".into(),
        ));
    }
    let x_hat = hat_matrix(c.x(), tol)?;
    let y_hat = hat_matrix(c.y(), tol)?;
    // Multiplicativity self-check in debug builds: X^2 commutes with sigma,
    // and its hat must be the square of the hat.
    #[cfg(debug_assertions)]
    {
        let xx = c.x() * c.x();
        if let Ok(hxx) = hat_matrix(&xx, tol) {
            let direct = &x_hat * &x_hat;
            debug_assert!(
                (hxx - &direct).norm() <= 1e-9 * direct.norm().max(1.0),
                "hat map lost multiplicativity"
            );
        }
    }
    Ok(GaugeChannel::from_parts_unchecked(x_hat, y_hat))
}

/// Rebuild the phase-space channel from its hat form. Complete positivity
/// of the output follows from the both-signs hat condition.
pub fn unhat(g: &GaugeChannel) -> GaussianChannel {
    let x = unhat_matrix(&g.x_hat);
    let y = unhat_matrix(&g.y_hat);
    GaussianChannel::from_parts_unchecked(x, y)
}
