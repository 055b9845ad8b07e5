//! Infinitesimal divisibility: the determinant obstruction, the
//! Jordan-grouping construction for positive determinants, and monotonicity
//! under added noise.

use crate::channel::GaussianChannel;
use crate::linalg::{
    cluster_negative_eigenvalues, kernel_onb, orthonormal_complement, psd_check_real,
    spectral_norm, sylvester_solve, LinalgError, RealMatrix, Tolerance,
};

use super::{embeddable_x, SemigroupError};

/// Necessary condition: an infinitesimal divisible channel has
/// `det X >= 0`. `false` certifies the channel is NOT infinitesimal
/// divisible.
pub fn infdiv_necessary(c: &GaussianChannel, tol: Tolerance) -> bool {
    c.x().determinant() >= -tol.band(1.0)
}

/// For `det x > 0`, build an infinitesimal divisible channel with this `x`:
/// group the negative-eigenvalue part into a reflection `x_1` (eigenvalue
/// `-1` with even multiplicity) and the rest into `x_2`, take the witness
/// semigroups of both factors at `t = 1`, and compose.
pub fn infdiv_construct(
    x: &RealMatrix,
    tol: Tolerance,
) -> Result<GaussianChannel, SemigroupError> {
    if x.nrows() != x.ncols() || x.nrows() == 0 || !x.nrows().is_multiple_of(2) {
        return Err(SemigroupError::InvalidGenerator(format!(
            "expected a square matrix of even dimension, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let det = x.determinant();
    if det <= tol.band(1.0) {
        return Err(SemigroupError::NonPositiveDeterminant);
    }
    let d = x.nrows();
    let clusters = cluster_negative_eigenvalues(x, tol);
    let (x1, x2) = if clusters.is_empty() {
        (RealMatrix::identity(d, d), x.clone())
    } else {
        reflection_split(x, &clusters, tol)?
    };

    let g1 = match embeddable_x(&x1, tol)? {
        super::EmbeddabilityVerdict::Yes { witness } => witness,
        other => {
            return Err(SemigroupError::Indeterminate(format!(
                "reflection factor is not embeddable: {other:?}"
            )))
        }
    };
    let g2 = match embeddable_x(&x2, tol)? {
        super::EmbeddabilityVerdict::Yes { witness } => witness,
        other => {
            return Err(SemigroupError::Indeterminate(format!(
                "positive-spectrum factor is not embeddable: {other:?}"
            )))
        }
    };
    let c1 = g1.evolve(1.0)?;
    let c2 = g2.evolve(1.0)?;
    Ok(c1.compose(&c2)?)
}

/// Split `x = x1 x2` with `x1` the `-I (+) I` reflection across the direct
/// sum of all negative eigenspaces and `x2 = x1 x` carrying the reflected
/// (positive) spectrum. Diagonalizable negative eigenvalues only; the
/// numerical Jordan form of a defective cluster is not trusted.
fn reflection_split(
    x: &RealMatrix,
    clusters: &[(f64, usize)],
    tol: Tolerance,
) -> Result<(RealMatrix, RealMatrix), SemigroupError> {
    let d = x.nrows();
    let mut total = 0usize;
    let mut neg_basis: Vec<nalgebra::DVector<f64>> = Vec::new();
    let wide = Tolerance { abs_eps: tol.abs_eps.max(1e-8), rel_eps: tol.rel_eps.max(1e-8) };
    for &(lambda, mult) in clusters {
        let shifted = x - RealMatrix::identity(d, d).scale(lambda);
        let ker = kernel_onb(&shifted, wide);
        if ker.ncols() != mult {
            return Err(SemigroupError::Linalg(LinalgError::IllConditioned(format!(
                "negative eigenvalue {lambda} is defective; Jordan grouping not attempted"
            ))));
        }
        total += mult;
        for j in 0..mult {
            neg_basis.push(ker.column(j).into_owned());
        }
    }
    if !total.is_multiple_of(2) {
        // det > 0 forces even total multiplicity; getting here means the
        // cluster detection misjudged the spectrum.
        return Err(SemigroupError::Linalg(LinalgError::IllConditioned(
            "negative eigenvalue multiplicities are inconsistent with det > 0".into(),
        )));
    }
    // Orthonormalize the union (eigenspaces of distinct eigenvalues need not
    // be orthogonal).
    let mut onb: Vec<nalgebra::DVector<f64>> = Vec::new();
    for mut v in neg_basis {
        for u in &onb {
            let c = u.dot(&v);
            v -= u * c;
        }
        if v.norm() < 1e-8 {
            return Err(SemigroupError::Linalg(LinalgError::IllConditioned(
                "negative eigenspaces are numerically dependent".into(),
            )));
        }
        v /= v.norm();
        onb.push(v);
    }
    let v = RealMatrix::from_columns(&onb);
    let k = v.ncols();
    if k == d {
        // Purely negative spectrum: the reflection is global.
        return Ok((-RealMatrix::identity(d, d), -x));
    }
    let q = orthonormal_complement(&v);
    let mut t = RealMatrix::zeros(d, d);
    t.view_mut((0, 0), (d, k)).copy_from(&v);
    t.view_mut((0, k), (d, d - k)).copy_from(&q);
    let a = t.transpose() * x * &t;
    let dneg = a.view((0, 0), (k, k)).into_owned();
    let c = a.view((0, k), (k, d - k)).into_owned();
    let r = a.view((k, k), (d - k, d - k)).into_owned();
    if a.view((k, 0), (d - k, k)).norm() > 1e-8 * spectral_norm(x).max(1.0) {
        return Err(SemigroupError::Linalg(LinalgError::IllConditioned(
            "negative invariant subspace leaked".into(),
        )));
    }
    // Decouple: Z R - Dneg Z = C.
    let z = sylvester_solve(&(-&dneg), &r, &c, tol).map_err(SemigroupError::Linalg)?;
    let mut m = RealMatrix::identity(d, d);
    m.view_mut((0, k), (k, d - k)).copy_from(&z);
    let mut minv = RealMatrix::identity(d, d);
    minv.view_mut((0, k), (k, d - k)).copy_from(&(-&z));
    let basis = &t * m;
    let basis_inv = minv * t.transpose();

    let mut refl = RealMatrix::identity(d, d);
    for i in 0..k {
        refl[(i, i)] = -1.0;
    }
    let x1 = &basis * refl * &basis_inv;
    let x2 = &x1 * x;
    Ok((x1, x2))
}

/// Added noise keeps the certificate: if `(x, y)` is infinitesimal
/// divisible and `y_new >= y`, so is `(x, y_new)`. The difference splits
/// into arbitrarily small additive-noise pieces.
pub fn infdiv_monotone(
    c: &GaussianChannel,
    y_new: &RealMatrix,
    tol: Tolerance,
) -> Result<bool, SemigroupError> {
    if y_new.shape() != c.y().shape() {
        return Err(SemigroupError::InvalidGenerator(format!(
            "replacement noise must be {}x{}, got {}x{}",
            c.y().nrows(),
            c.y().ncols(),
            y_new.nrows(),
            y_new.ncols()
        )));
    }
    let diff = y_new - c.y();
    if !psd_check_real(&diff, tol).map_err(SemigroupError::Linalg)? {
        return Err(SemigroupError::NotGreaterNoise);
    }
    Ok(true)
}
