//! Existence test and construction of real matrix logarithms.
//!
//! A real matrix has a real logarithm iff it is nonsingular and its Jordan
//! blocks for negative eigenvalues pair up with even multiplicities. The
//! existence test decides this from rank differences of `(x - lambda I)^k`;
//! the construction splits off the negative-eigenvalue part (diagonalizable
//! pairs only), rotates it by pi, and takes the principal logarithm on the
//! rest by inverse scaling-and-squaring.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{
    check_finite, check_square, expm, kernel_onb, orthonormal_complement, spectral_norm,
    LinalgError, RealMatrix, Tolerance,
};

/// Jordan structure at one negative eigenvalue: the block sizes, each listed
/// as often as it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanNegativeReport {
    pub eigenvalue: f64,
    pub block_sizes: Vec<usize>,
}

pub(crate) fn cluster_negative_eigenvalues(x: &RealMatrix, tol: Tolerance) -> Vec<(f64, usize)> {
    let scale = spectral_norm(x).max(1.0);
    let imag_band = (tol.band(scale) * 100.0).max(1e-7 * scale);
    let evs = x.complex_eigenvalues();
    let mut negs: Vec<f64> = evs
        .iter()
        .filter(|z: &&Complex64| z.im.abs() <= imag_band && z.re < -tol.band(scale))
        .map(|z| z.re)
        .collect();
    negs.sort_by(f64::total_cmp);
    let radius = (tol.band(scale) * 1000.0).max(1e-6 * scale);
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in negs {
        match clusters.last_mut() {
            Some((rep, count)) if (v - *rep).abs() <= radius => {
                *rep = (*rep * *count as f64 + v) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    clusters
}

/// Jordan block sizes at `lambda` via rank differences of `(x - lambda I)^k`.
fn jordan_block_sizes(
    x: &RealMatrix,
    lambda: f64,
    multiplicity: usize,
    tol: Tolerance,
) -> Result<Vec<usize>, LinalgError> {
    let d = x.nrows();
    let b = x - RealMatrix::identity(d, d).scale(lambda);
    let bnorm = spectral_norm(&b);
    let mut ranks = vec![d];
    let mut power = RealMatrix::identity(d, d);
    for k in 1..=d {
        power = &power * &b;
        if power.iter().all(|&v| v == 0.0) {
            ranks.push(0);
            break;
        }
        let sv = power.clone().singular_values();
        // The noise floor of a k-fold product scales with ||B||^k, not with
        // the product's own largest singular value.
        let band = tol.band(bnorm.powi(k as i32));
        // Singular values sitting inside the band neighborhood make the rank
        // decision ambiguous; report instead of guessing.
        if sv.iter().any(|&s| s > band * 0.2 && s < band * 5.0) {
            return Err(LinalgError::IllConditioned(format!(
                "rank of (x - {lambda} I)^{k} is ambiguous within the tolerance band"
            )));
        }
        let r = sv.iter().filter(|&&s| s > band).count();
        ranks.push(r);
        if r == ranks[ranks.len() - 2] {
            break;
        }
    }
    // blocks_ge[k] = number of Jordan blocks of size >= k.
    let mut blocks_ge: Vec<usize> = Vec::new();
    for k in 1..ranks.len() {
        let prev = ranks[k - 1];
        let cur = ranks[k];
        if cur > prev {
            return Err(LinalgError::IllConditioned(
                "rank sequence is not monotone".into(),
            ));
        }
        blocks_ge.push(prev - cur);
    }
    for w in blocks_ge.windows(2) {
        if w[1] > w[0] {
            return Err(LinalgError::IllConditioned(
                "Jordan block counts are inconsistent".into(),
            ));
        }
    }
    let mut sizes = Vec::new();
    for k in 0..blocks_ge.len() {
        let next = blocks_ge.get(k + 1).copied().unwrap_or(0);
        for _ in 0..blocks_ge[k] - next {
            sizes.push(k + 1);
        }
    }
    let total: usize = sizes.iter().sum();
    if total != multiplicity {
        return Err(LinalgError::IllConditioned(format!(
            "Jordan sizes at {lambda} sum to {total}, eigenvalue multiplicity is {multiplicity}"
        )));
    }
    sizes.sort_unstable();
    Ok(sizes)
}

/// Decide whether `x` has a real logarithm.
///
/// Returns `false` for singular input; otherwise reports the Jordan
/// structure of every negative eigenvalue and requires each block size to
/// occur an even number of times.
pub fn real_log_exists(
    x: &RealMatrix,
    tol: Tolerance,
) -> Result<(bool, Vec<JordanNegativeReport>), LinalgError> {
    let d = check_square(x)?;
    check_finite(x)?;
    if d == 0 {
        return Ok((true, vec![]));
    }
    let sv = x.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if smin <= tol.band(smax) {
        return Ok((false, vec![]));
    }
    let mut reports = Vec::new();
    let mut all_even = true;
    for (lambda, mult) in cluster_negative_eigenvalues(x, tol) {
        let sizes = jordan_block_sizes(x, lambda, mult, tol)?;
        let mut counts = std::collections::BTreeMap::new();
        for &s in &sizes {
            *counts.entry(s).or_insert(0usize) += 1;
        }
        if counts.values().any(|&c| c % 2 != 0) {
            all_even = false;
        }
        reports.push(JordanNegativeReport { eigenvalue: lambda, block_sizes: sizes });
    }
    Ok((all_even, reports))
}

/// Matrix square root by the Denman-Beavers iteration. Converges for
/// matrices with no eigenvalues on the closed negative real axis.
fn sqrtm_db(a: &RealMatrix) -> Result<RealMatrix, LinalgError> {
    let d = a.nrows();
    let mut y = a.clone();
    let mut z = RealMatrix::identity(d, d);
    for _ in 0..80 {
        let yinv = y.clone().try_inverse().ok_or(LinalgError::Singular)?;
        let zinv = z.clone().try_inverse().ok_or(LinalgError::Singular)?;
        let yn = (&y + &zinv).scale(0.5);
        let zn = (&z + &yinv).scale(0.5);
        let delta = (&yn - &y).norm();
        y = yn;
        z = zn;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(LinalgError::Overflow);
        }
        if delta <= 1e-15 * y.norm().max(1.0) {
            break;
        }
    }
    Ok(y)
}

/// Principal logarithm via inverse scaling-and-squaring: repeated square
/// roots until close to the identity, then the Gregory series
/// `log A = 2 atanh((A - I)(A + I)^{-1})`.
fn principal_log(x: &RealMatrix) -> Result<RealMatrix, LinalgError> {
    let d = x.nrows();
    let eye = RealMatrix::identity(d, d);
    let mut a = x.clone();
    let mut k = 0u32;
    while (&a - &eye).norm() > 0.25 {
        a = sqrtm_db(&a)?;
        k += 1;
        if k > 60 {
            return Err(LinalgError::IllConditioned(
                "inverse scaling-and-squaring did not contract".into(),
            ));
        }
    }
    let num = &a - &eye;
    let den = (&a + &eye)
        .try_inverse()
        .ok_or(LinalgError::Singular)?;
    let g = num * den;
    let g2 = &g * &g;
    let mut term = g.clone();
    let mut sum = g.scale(1.0);
    for j in (3..=27u32).step_by(2) {
        term = &term * &g2;
        sum += term.scale(1.0 / j as f64);
    }
    Ok(sum.scale(2.0 * f64::powi(2.0, k as i32)))
}

/// Log of `lambda I_m` for `lambda < 0`, `m` even: `ln|lambda| I` plus a
/// pi-rotation pairing the coordinates, so the exponential is `-|lambda| I`.
fn negative_scalar_log(lambda: f64, m: usize) -> RealMatrix {
    let mut l = RealMatrix::identity(m, m).scale(lambda.abs().ln());
    for p in 0..m / 2 {
        l[(2 * p, 2 * p + 1)] = std::f64::consts::PI;
        l[(2 * p + 1, 2 * p)] = -std::f64::consts::PI;
    }
    l
}

/// Logarithm of an orthogonal matrix from its canonical rotation planes.
///
/// Eigenvectors of `x + x^T` group the space into invariant planes with
/// rotation angle `theta`; reflections (`theta = pi`) are paired, which is
/// possible exactly when the `-1` eigenspace has even dimension.
fn orthogonal_log(x: &RealMatrix, tol: Tolerance) -> Result<RealMatrix, LinalgError> {
    let d = x.nrows();
    let sym = (x + x.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<f64> = Vec::new();
    for &i in &order {
        let v = eig.eigenvalues[i];
        match reps.last() {
            Some(&r) if (r - v).abs() <= 1e-8 => clusters.last_mut().unwrap().push(i),
            _ => {
                clusters.push(vec![i]);
                reps.push(v);
            }
        }
    }

    let mut log = RealMatrix::zeros(d, d);
    for cluster in clusters {
        let c = (eig.eigenvalues[cluster[0]]).clamp(-1.0, 1.0);
        let theta = c.acos();
        let basis: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        if theta.abs() < 1e-8 {
            // Fixed space, contributes nothing.
            continue;
        }
        if (std::f64::consts::PI - theta).abs() < 1e-8 {
            // Reflection space: x acts as -I; pair the basis vectors into
            // pi-rotation planes.
            if !basis.len().is_multiple_of(2) {
                return Err(LinalgError::NoRealLog);
            }
            for pair in basis.chunks(2) {
                let (v, w) = (&pair[0], &pair[1]);
                let plane = (w * v.transpose() - v * w.transpose()).scale(std::f64::consts::PI);
                log += plane;
            }
            continue;
        }
        // Proper rotation planes: partner w = (x v - cos t v) / sin t.
        let s = theta.sin();
        let mut remaining = basis;
        let mut used: Vec<DVector<f64>> = Vec::new();
        while let Some(mut v) = remaining.pop() {
            for u in &used {
                let c2 = u.dot(&v);
                v -= u * c2;
            }
            if v.norm() < 1e-6 {
                continue;
            }
            v /= v.norm();
            let w = (x * &v - v.scale(c)) / s;
            if (w.norm() - 1.0).abs() > 1e-6 || w.dot(&v).abs() > 1e-6 {
                return Err(LinalgError::IllConditioned(
                    "orthogonal rotation plane extraction failed".into(),
                ));
            }
            // Rotation by theta in the (v, w) plane: x v = c v + s w.
            log += (&w * v.transpose() - &v * w.transpose()).scale(theta);
            used.push(v);
            used.push(w);
        }
    }
    let check = expm(&log)?;
    if (&check - x).norm() > 1e-6 * spectral_norm(x).max(1.0) {
        return Err(LinalgError::IllConditioned(
            "orthogonal logarithm round trip failed".into(),
        ));
    }
    let _ = tol;
    Ok(log)
}

/// Construct a real logarithm of `x`.
///
/// Negative eigenvalues are handled for diagonalizable pairs: their
/// eigenspaces are split off by a similarity built from an orthonormal
/// kernel basis and a Sylvester decoupling, rotated by pi, and the
/// remainder takes the principal branch. Defective negative pairings are
/// reported as `IllConditioned` rather than constructed from an unstable
/// numerical Jordan form.
pub fn real_log(x: &RealMatrix, tol: Tolerance) -> Result<RealMatrix, LinalgError> {
    let d = check_square(x)?;
    check_finite(x)?;
    if d == 0 {
        return Ok(x.clone());
    }
    let (exists, _) = real_log_exists(x, tol)?;
    if !exists {
        return Err(LinalgError::NoRealLog);
    }
    let scale = spectral_norm(x);

    let log = if (x * x.transpose() - RealMatrix::identity(d, d)).norm() <= 1e-10 * scale.max(1.0) {
        orthogonal_log(x, tol)?
    } else {
        log_splitting_negatives(x, tol, 0)?
    };

    let round = expm(&log)?;
    if (&round - x).norm() > 1e-6 * scale {
        return Err(LinalgError::IllConditioned(
            "real logarithm round trip above bound".into(),
        ));
    }
    Ok(log)
}

/// Peel one negative-eigenvalue cluster at a time.
///
/// The kernel of `x - lambda I` is exactly invariant, so in the orthonormal
/// basis `[V | V_perp]` the matrix is `[[lambda I, C], [0, R]]`; the
/// similarity `[[I, Z], [0, I]]` with `Z = C (R - lambda I)^{-1}` decouples
/// the blocks, the `lambda I` block gets the pi-rotation log, and `R`
/// recurses on the remaining spectrum.
fn log_splitting_negatives(
    x: &RealMatrix,
    tol: Tolerance,
    depth: usize,
) -> Result<RealMatrix, LinalgError> {
    let d = x.nrows();
    let clusters = cluster_negative_eigenvalues(x, tol);
    let Some(&(lambda, mult)) = clusters.first() else {
        return principal_log(x);
    };
    if depth > d {
        return Err(LinalgError::IllConditioned(
            "negative-eigenvalue splitting did not terminate".into(),
        ));
    }
    if mult % 2 != 0 {
        return Err(LinalgError::NoRealLog);
    }
    let shifted = x - RealMatrix::identity(d, d).scale(lambda);
    // Kernel tolerance widened: eigenvalue estimates carry more noise than
    // the backward error of the SVD.
    let wide = Tolerance { abs_eps: tol.abs_eps.max(1e-8), rel_eps: tol.rel_eps.max(1e-8) };
    let v = kernel_onb(&shifted, wide);
    if v.ncols() != mult {
        return Err(LinalgError::IllConditioned(format!(
            "negative eigenvalue {lambda} is defective; paired-rotation construction needs \
             diagonalizable pairs"
        )));
    }
    let k = v.ncols();
    if k == d {
        return Ok(negative_scalar_log(lambda, k));
    }
    let q = orthonormal_complement(&v);
    let mut t = RealMatrix::zeros(d, d);
    t.view_mut((0, 0), (d, k)).copy_from(&v);
    t.view_mut((0, k), (d, d - k)).copy_from(&q);
    let a = t.transpose() * x * &t;
    let c = a.view((0, k), (k, d - k)).into_owned();
    let r = a.view((k, k), (d - k, d - k)).into_owned();
    let lower = a.view((k, 0), (d - k, k)).norm();
    if lower > 1e-8 * spectral_norm(x).max(1.0) {
        return Err(LinalgError::IllConditioned(
            "negative eigenspace is not invariant within tolerance".into(),
        ));
    }
    let rshift = &r - RealMatrix::identity(d - k, d - k).scale(lambda);
    let rinv = rshift
        .try_inverse()
        .ok_or_else(|| LinalgError::IllConditioned("negative cluster split is singular".into()))?;
    let z = &c * rinv;

    let log_d = negative_scalar_log(lambda, k);
    let log_r = log_splitting_negatives(&r, tol, depth + 1)?;

    let mut block = RealMatrix::zeros(d, d);
    block.view_mut((0, 0), (k, k)).copy_from(&log_d);
    block.view_mut((k, k), (d - k, d - k)).copy_from(&log_r);
    let mut m = RealMatrix::identity(d, d);
    m.view_mut((0, k), (k, d - k)).copy_from(&z);
    let mut minv = RealMatrix::identity(d, d);
    minv.view_mut((0, k), (k, d - k)).copy_from(&(-&z));
    Ok(&t * m * block * minv * t.transpose())
}
