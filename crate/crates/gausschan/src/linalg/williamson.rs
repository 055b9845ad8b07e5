//! Symplectic (Williamson) diagonalization of positive-definite symmetric
//! matrices.

use nalgebra::{DVector, SymmetricEigen};

use super::{
    antisym_canonical, check_finite, check_square, spectral_norm, symplectic_form, LinalgError,
    RealMatrix, Tolerance,
};

/// Symplectic diagonalization `S m S^T = (+) y_j I_2` of a positive-definite
/// symmetric matrix, with `S sigma S^T = sigma`.
///
/// Returns `(S, [y_1, ..., y_n])`. Construction: with `W = m^{-1/2} sigma
/// m^{-1/2}` in canonical form `R^T W R = (+) w_j sigma_1`, the symplectic
/// eigenvalues are `y_j = 1 / w_j` and `S = (+) sqrt(y_j) I_2 * R^T *
/// m^{-1/2}`.
pub fn williamson(m: &RealMatrix, tol: Tolerance) -> Result<(RealMatrix, Vec<f64>), LinalgError> {
    let d = check_square(m)?;
    check_finite(m)?;
    if d == 0 || d % 2 != 0 {
        return Err(LinalgError::DimensionMismatch(format!(
            "williamson needs a nonempty even dimension, got {d}"
        )));
    }
    let scale = spectral_norm(m);
    if (m - m.transpose()).norm() > tol.band(scale.max(1.0)) {
        return Err(LinalgError::NotPositiveDefinite);
    }

    let eig = SymmetricEigen::new((m + m.transpose()).scale(0.5));
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig <= tol.band(scale) {
        return Err(LinalgError::NotPositiveDefinite);
    }
    let inv_sqrt = DVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| 1.0 / l.sqrt()));
    let m_inv_sqrt = &eig.eigenvectors * RealMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();

    let sigma = symplectic_form(d / 2);
    let w = &m_inv_sqrt * &sigma * &m_inv_sqrt;
    let canon = antisym_canonical(&w, tol)?;
    if canon.kernel_dim != 0 || canon.block_values.len() != d / 2 {
        return Err(LinalgError::NotPositiveDefinite);
    }

    let mut lam = DVector::zeros(d);
    let mut eigenvalues = Vec::with_capacity(d / 2);
    for (k, &wj) in canon.block_values.iter().enumerate() {
        let y = 1.0 / wj;
        eigenvalues.push(y);
        lam[2 * k] = y.sqrt();
        lam[2 * k + 1] = y.sqrt();
    }
    let s = RealMatrix::from_diagonal(&lam) * canon.rotation.transpose() * &m_inv_sqrt;

    // The congruences are validated here so downstream callers can rely on
    // them without re-checking.
    let symp_resid = (&s * &sigma * s.transpose() - &sigma).norm();
    let mut target = RealMatrix::zeros(d, d);
    for (k, &y) in eigenvalues.iter().enumerate() {
        target[(2 * k, 2 * k)] = y;
        target[(2 * k + 1, 2 * k + 1)] = y;
    }
    let diag_resid = (&s * m * s.transpose() - &target).norm();
    // The symplectic residual lives at the scale of sigma, the diagonal
    // residual at the scale of m.
    if symp_resid > 1e-7 * sigma.norm() || diag_resid > 1e-7 * scale {
        return Err(LinalgError::IllConditioned(
            "williamson residual above bound".into(),
        ));
    }
    Ok((s, eigenvalues))
}
