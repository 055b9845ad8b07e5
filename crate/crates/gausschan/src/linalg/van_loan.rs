//! Noise integral of one-parameter semigroups through a single block-matrix
//! exponential, after Van Loan. Exact up to the accuracy of `expm`, with no
//! step-size control to tune.

use super::{check_finite, check_square, expm, LinalgError, RealMatrix, Tolerance};

/// Compute `int_0^t e^{s f^T} c e^{s f} ds`.
///
/// The integral is the `(1,2)` block of `exp(t [[-f^T, c], [0, f]])`
/// premultiplied by `e^{t f^T}`; the result is symmetrized before returning.
pub fn vanloan_noise_integral(
    f: &RealMatrix,
    c: &RealMatrix,
    t: f64,
    tol: Tolerance,
) -> Result<RealMatrix, LinalgError> {
    let d = check_square(f)?;
    if check_square(c)? != d {
        return Err(LinalgError::DimensionMismatch(
            "integrand factors must have one square dimension".into(),
        ));
    }
    check_finite(f)?;
    check_finite(c)?;
    if !t.is_finite() || t < 0.0 {
        return Err(LinalgError::NonFinite);
    }
    let sym_resid = (c - c.transpose()).norm();
    if sym_resid > tol.band(c.norm().max(1.0)) {
        return Err(LinalgError::DimensionMismatch(
            "noise integrand must be symmetric".into(),
        ));
    }
    if t == 0.0 || d == 0 {
        return Ok(RealMatrix::zeros(d, d));
    }

    let mut block = RealMatrix::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(&(-f.transpose()));
    block.view_mut((0, d), (d, d)).copy_from(c);
    block.view_mut((d, d), (d, d)).copy_from(f);
    let e = expm(&block.scale(t))?;
    let f12 = e.view((0, d), (d, d)).into_owned();
    let f22 = e.view((d, d), (d, d)).into_owned();
    let g = f22.transpose() * f12;
    Ok((&g + g.transpose()).scale(0.5))
}
