//! Symplectic normal form of idempotent channels.
//!
//! An idempotent `(X, Y)` (`X^2 = X`, `X Y = 0`) is symplectically
//! equivalent to "identity on 2k coordinates, state preparation on the
//! rest": `S X S^{-1} = diag(1...1, 0...0)` and `S Y S^T =
//! diag(0...0, y_1, y_1, ..., y_{n-k}, y_{n-k})` with every `y_j >= 1`.

use crate::linalg::{
    antisym_canonical, symplectic_form, williamson, LinalgError, RealMatrix, Tolerance,
};

use super::{ChannelError, GaussianChannel};

/// Normal-form data: the symplectic transformation, the
/// number of untouched modes `k`, and the preparation noise eigenvalues.
#[derive(Debug, Clone)]
pub struct IdempotentNormalForm {
    pub symplectic: RealMatrix,
    pub identity_modes: usize,
    pub noise_eigenvalues: Vec<f64>,
}

/// Build a congruence `Q` on a subspace basis `b` (columns orthonormal) so
/// that `(b Q)^T sigma (b Q)` is the standard form on the subspace. Returns
/// `(Q, Q^{-1})`; the inverse is exact from the factored form.
fn symplectify(
    b: &RealMatrix,
    sigma: &RealMatrix,
    tol: Tolerance,
) -> Result<(RealMatrix, RealMatrix), ChannelError> {
    let dim = b.ncols();
    let restricted = b.transpose() * sigma * b;
    let canon = antisym_canonical(&restricted, tol)?;
    if canon.kernel_dim != 0 || canon.block_values.len() != dim / 2 {
        return Err(ChannelError::NumericalFailure(
            "subspace is not symplectic: restricted form is degenerate".into(),
        ));
    }
    let mut scaling = nalgebra::DVector::zeros(dim);
    let mut inv_scaling = nalgebra::DVector::zeros(dim);
    for (j, &bv) in canon.block_values.iter().enumerate() {
        scaling[2 * j] = 1.0 / bv.sqrt();
        scaling[2 * j + 1] = 1.0 / bv.sqrt();
        inv_scaling[2 * j] = bv.sqrt();
        inv_scaling[2 * j + 1] = bv.sqrt();
    }
    let q = &canon.rotation * RealMatrix::from_diagonal(&scaling);
    let q_inv = RealMatrix::from_diagonal(&inv_scaling) * canon.rotation.transpose();
    Ok((q, q_inv))
}

pub(crate) fn idempotent_normal_form(
    c: &GaussianChannel,
    tol: Tolerance,
) -> Result<IdempotentNormalForm, ChannelError> {
    if !c.is_idempotent(tol) {
        return Err(ChannelError::NotIdempotent);
    }
    let d = 2 * c.modes();
    let sigma = symplectic_form(c.modes());

    // Range and kernel of X from one SVD so they are exactly complementary.
    let svd = c.x().clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let band = tol.band(smax.max(1.0));
    let rank = svd.singular_values.iter().filter(|&&s| s > band).count();
    if rank % 2 != 0 {
        return Err(ChannelError::NumericalFailure(format!(
            "idempotent X has odd rank {rank}; not a symplectic projection"
        )));
    }
    let k = rank / 2;
    let u = svd.u.as_ref().expect("svd u");
    let vt = svd.v_t.as_ref().expect("svd v_t");
    let b1 = u.columns(0, rank).into_owned();
    let b2 = vt.rows(rank, d - rank).transpose().into_owned();

    let mut g_cols: Vec<RealMatrix> = Vec::new();
    if rank > 0 {
        let (q1, _) = symplectify(&b1, &sigma, tol)?;
        g_cols.push(&b1 * q1);
    }

    let mut noise = Vec::new();
    if rank < d {
        let (q20, q20_inv) = symplectify(&b2, &sigma, tol)?;
        let y2 = b2.transpose() * c.y() * &b2;
        let y2_symplectic = &q20_inv * y2 * q20_inv.transpose();
        let (w, ys) = match williamson(&y2_symplectic, tol) {
            Ok(res) => res,
            Err(LinalgError::NotPositiveDefinite) => return Err(ChannelError::DegenerateNoise),
            Err(e) => return Err(e.into()),
        };
        let w_inv = w
            .try_inverse()
            .ok_or_else(|| ChannelError::NumericalFailure("williamson factor not invertible".into()))?;
        g_cols.push(&b2 * q20 * w_inv);
        noise = ys;
    }

    let mut g = RealMatrix::zeros(d, d);
    let mut off = 0;
    for block in &g_cols {
        g.view_mut((0, off), (d, block.ncols())).copy_from(block);
        off += block.ncols();
    }
    let s = g
        .clone()
        .try_inverse()
        .ok_or_else(|| ChannelError::NumericalFailure("normal-form basis not invertible".into()))?;

    // Reconstruction checks: the claimed congruences must hold.
    let scale = c.y().norm().max(1.0);
    let symp_resid = (g.transpose() * &sigma * &g - &sigma).norm();
    let mut x_target = RealMatrix::zeros(d, d);
    for i in 0..rank {
        x_target[(i, i)] = 1.0;
    }
    let x_resid = (&s * c.x() * &g - &x_target).norm();
    let mut y_target = RealMatrix::zeros(d, d);
    for (j, &y) in noise.iter().enumerate() {
        y_target[(rank + 2 * j, rank + 2 * j)] = y;
        y_target[(rank + 2 * j + 1, rank + 2 * j + 1)] = y;
    }
    let y_resid = (&s * c.y() * s.transpose() - &y_target).norm();
    if symp_resid > 1e-7 * scale || x_resid > 1e-7 * scale || y_resid > 1e-7 * scale {
        return Err(ChannelError::NumericalFailure(format!(
            "normal-form reconstruction residuals {symp_resid:.2e}/{x_resid:.2e}/{y_resid:.2e}"
        )));
    }
    let quantum_floor = 1.0 - tol.band(1.0);
    if noise.iter().any(|&y| y < quantum_floor) {
        return Err(ChannelError::NumericalFailure(
            "preparation noise below the quantum limit".into(),
        ));
    }

    Ok(IdempotentNormalForm { symplectic: s, identity_modes: k, noise_eigenvalues: noise })
}
