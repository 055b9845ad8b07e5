//! Real orthogonal canonical form of antisymmetric matrices and the
//! `N sigma N^T` factorization built on it.

use nalgebra::{DVector, SymmetricEigen};

use super::{
    check_finite, check_square, spectral_norm, symplectic_form, LinalgError, RealMatrix, Tolerance,
};

/// Canonical form `R^T M R = (+) b_j sigma_1 (+) 0` of an antisymmetric
/// matrix: orthogonal `R`, block values `b_j > 0` sorted descending, and the
/// trailing kernel dimension.
#[derive(Debug, Clone)]
pub struct AntisymCanonical {
    pub rotation: RealMatrix,
    pub block_values: Vec<f64>,
    pub kernel_dim: usize,
}

fn antisymmetry_residual(m: &RealMatrix) -> f64 {
    (m + m.transpose()).norm()
}

/// Recognize a matrix that is already in canonical layout so that structured
/// inputs (the symplectic form itself, scalar multiples of it) come back with
/// `R = I` exactly.
fn canonical_fast_path(m: &RealMatrix, pair_tol: f64) -> Option<AntisymCanonical> {
    let d = m.nrows();
    if !d.is_multiple_of(2) {
        return None;
    }
    let mut blocks = Vec::with_capacity(d / 2);
    for k in 0..d / 2 {
        let b = m[(2 * k, 2 * k + 1)];
        if b < 0.0 {
            return None;
        }
        blocks.push(b);
    }
    // Nonzero blocks must come first and be sorted descending.
    for w in blocks.windows(2) {
        if w[1] > w[0] + pair_tol {
            return None;
        }
    }
    for i in 0..d {
        for j in 0..d {
            let expected = if i / 2 == j / 2 {
                if i == j {
                    0.0
                } else if i < j {
                    blocks[i / 2]
                } else {
                    -blocks[i / 2]
                }
            } else {
                0.0
            };
            if (m[(i, j)] - expected).abs() > pair_tol {
                return None;
            }
        }
    }
    let kernel_dim = 2 * blocks.iter().filter(|&&b| b <= pair_tol).count();
    blocks.retain(|&b| b > pair_tol);
    Some(AntisymCanonical { rotation: RealMatrix::identity(d, d), block_values: blocks, kernel_dim })
}

/// Orthogonal canonical form of a real antisymmetric matrix.
///
/// Works on the symmetric PSD matrix `-M^2 = M^T M`: its eigenvalues are the
/// squared block values `b^2`, and within each eigenspace the pairs
/// `(Mv/b, v)` span the invariant 2-planes.
pub fn antisym_canonical(m: &RealMatrix, tol: Tolerance) -> Result<AntisymCanonical, LinalgError> {
    let d = check_square(m)?;
    check_finite(m)?;
    let scale = spectral_norm(m);
    if antisymmetry_residual(m) > tol.band(scale.max(1.0)) {
        return Err(LinalgError::NotAntisymmetric);
    }
    if d == 0 {
        return Ok(AntisymCanonical {
            rotation: RealMatrix::identity(0, 0),
            block_values: vec![],
            kernel_dim: 0,
        });
    }
    if let Some(c) = canonical_fast_path(m, 1e-13 * scale.max(1.0)) {
        return Ok(c);
    }

    let gram = m.transpose() * m;
    let eig = SymmetricEigen::new(gram);
    let lam_scale = (scale * scale).max(1.0);

    // Cluster eigenvalues of M^T M; each cluster is one block value b^2.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<f64> = Vec::new();
    for &i in &order {
        let v = eig.eigenvalues[i].max(0.0);
        match reps.last() {
            Some(&r) if (r - v).abs() <= 1e-9 * lam_scale => clusters.last_mut().unwrap().push(i),
            _ => {
                clusters.push(vec![i]);
                reps.push(v);
            }
        }
    }

    let mut pair_cols: Vec<DVector<f64>> = Vec::new();
    let mut block_values: Vec<f64> = Vec::new();
    let mut kernel_cols: Vec<DVector<f64>> = Vec::new();

    for cluster in clusters {
        let lambda: f64 =
            cluster.iter().map(|&i| eig.eigenvalues[i].max(0.0)).sum::<f64>() / cluster.len() as f64;
        // Kernel decision is made on b^2 where the eigensolver noise lives.
        if lambda <= tol.band(lam_scale) {
            for &i in &cluster {
                kernel_cols.push(eig.eigenvectors.column(i).into_owned());
            }
            continue;
        }
        let b = lambda.sqrt();
        // Peel invariant 2-planes (v, Mv/b) out of the eigenspace.
        let mut extracted: Vec<DVector<f64>> = Vec::new();
        let mut basis: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        while let Some(mut v) = basis.pop() {
            for p in &extracted {
                let c = p.dot(&v);
                v -= p * c;
            }
            let nv = v.norm();
            if nv < 1e-6 {
                continue;
            }
            v /= nv;
            let mut w = (m * &v) / b;
            for p in &extracted {
                let c = p.dot(&w);
                w -= p * c;
            }
            let c = v.dot(&w);
            w -= &v * c;
            // The partner must come back unit-length; anything else means the
            // clustering misjudged the spectrum.
            if (w.norm() - 1.0).abs() > 1e-6 {
                return Err(LinalgError::IllConditioned(
                    "antisymmetric canonical pairing degenerate".into(),
                ));
            }
            w /= w.norm();
            // Block convention [[0, b], [-b, 0]] wants the pair (w, v).
            extracted.push(w);
            extracted.push(v);
            block_values.push(b);
        }
        if extracted.len() != cluster.len() {
            return Err(LinalgError::IllConditioned(
                "antisymmetric eigenspace has odd pairing".into(),
            ));
        }
        pair_cols.extend(extracted);
    }

    // Deterministic ordering: blocks sorted by descending b.
    let mut idx: Vec<usize> = (0..block_values.len()).collect();
    idx.sort_by(|&i, &j| block_values[j].total_cmp(&block_values[i]));
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut sorted_blocks = Vec::with_capacity(block_values.len());
    for &i in &idx {
        sorted_blocks.push(block_values[i]);
        cols.push(pair_cols[2 * i].clone());
        cols.push(pair_cols[2 * i + 1].clone());
    }
    cols.extend(kernel_cols.iter().cloned());
    if cols.len() != d {
        return Err(LinalgError::IllConditioned(
            "antisymmetric canonical basis incomplete".into(),
        ));
    }
    let rotation = RealMatrix::from_columns(&cols);

    // Validate the congruence before handing it out.
    let mut canon = RealMatrix::zeros(d, d);
    for (k, &b) in sorted_blocks.iter().enumerate() {
        canon[(2 * k, 2 * k + 1)] = b;
        canon[(2 * k + 1, 2 * k)] = -b;
    }
    let resid = (rotation.transpose() * m * &rotation - &canon).norm();
    if resid > 1e-8 * scale.max(1.0) {
        return Err(LinalgError::IllConditioned(
            "antisymmetric canonical residual above bound".into(),
        ));
    }

    Ok(AntisymCanonical { rotation, block_values: sorted_blocks, kernel_dim: kernel_cols.len() })
}

/// Factor an antisymmetric `m` as `N sigma N^T` with `sigma` the standard
/// interleaved form. `N = R * diag(sqrt(b_1), sqrt(b_1), ...)` from the
/// canonical form; zero blocks are allowed and produce zero columns.
pub fn antisym_factor(m: &RealMatrix, tol: Tolerance) -> Result<RealMatrix, LinalgError> {
    let d = check_square(m)?;
    if d % 2 != 0 {
        return Err(LinalgError::DimensionMismatch(format!(
            "antisymmetric factorization needs even dimension, got {d}"
        )));
    }
    let canon = antisym_canonical(m, tol)?;
    let mut diag = DVector::zeros(d);
    for (k, &b) in canon.block_values.iter().enumerate() {
        diag[2 * k] = b.sqrt();
        diag[2 * k + 1] = b.sqrt();
    }
    let n = &canon.rotation * RealMatrix::from_diagonal(&diag);
    let sigma = symplectic_form(d / 2);
    let resid = (&n * sigma * n.transpose() - m).norm();
    if resid > 1e-8 * spectral_norm(m).max(1.0) {
        return Err(LinalgError::IllConditioned(
            "antisymmetric factor residual above bound".into(),
        ));
    }
    Ok(n)
}
