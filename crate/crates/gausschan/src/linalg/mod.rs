//! Matrix-analysis kernel: decompositions, spectral tests and linear solvers
//! for the channel algebra, with an explicit tolerance policy.
//!
//! All verdicts (positive semidefiniteness, rank, singularity) go through a
//! single [`Tolerance`] so that every downstream decision is reproducible
//! from one pair of knobs.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

mod antisym;
mod real_log;
mod sylvester;
mod van_loan;
mod williamson;

pub use antisym::{antisym_canonical, antisym_factor, AntisymCanonical};
pub(crate) use real_log::cluster_negative_eigenvalues;
pub use real_log::{real_log, real_log_exists, JordanNegativeReport};
pub use sylvester::{kron_product, kron_sum_solve, sylvester_solve};
pub use van_loan::vanloan_noise_integral;
pub use williamson::williamson;

/// Real matrix with dynamically determined shape, row-major construction.
pub type RealMatrix = DMatrix<f64>;
/// Complex matrix with dynamically determined shape.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Errors produced by the matrix kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix exponential overflowed the representable range")]
    Overflow,
    #[error("matrix has no real logarithm")]
    NoRealLog,
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("matrix is singular within tolerance")]
    Singular,
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("Kronecker sum is singular: some eigenvalue pair sums to zero")]
    SingularKroneckerSum,
}

/// Absolute/relative tolerance pair threaded through every numeric verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs_eps: 1e-9, rel_eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self, LinalgError> {
        if !(abs_eps.is_finite() && rel_eps.is_finite() && abs_eps >= 0.0 && rel_eps >= 0.0) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Tolerance { abs_eps, rel_eps })
    }

    /// One knob for both components, as the CLI `--tol` flag sets it.
    pub fn uniform(eps: f64) -> Result<Self, LinalgError> {
        Tolerance::new(eps, eps)
    }

    /// Decision band at a given scale: `abs_eps + rel_eps * scale`.
    pub fn band(&self, scale: f64) -> f64 {
        self.abs_eps + self.rel_eps * scale
    }
}

/// The standard symplectic form on `n` modes in interleaved ordering
/// `(q_1, p_1, ..., q_n, p_n)`: the direct sum of `n` copies of
/// `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(modes: usize) -> RealMatrix {
    let d = 2 * modes;
    let mut s = RealMatrix::zeros(d, d);
    for k in 0..modes {
        s[(2 * k, 2 * k + 1)] = 1.0;
        s[(2 * k + 1, 2 * k)] = -1.0;
    }
    s
}

pub(crate) fn check_square(m: &RealMatrix) -> Result<usize, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub(crate) fn check_square_c(m: &ComplexMatrix) -> Result<usize, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &RealMatrix) -> Result<(), LinalgError> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

pub(crate) fn check_finite_c(m: &ComplexMatrix) -> Result<(), LinalgError> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Largest singular value. Zero for an empty matrix.
pub fn spectral_norm(m: &RealMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |a, &b| a.max(b))
}

pub fn spectral_norm_c(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |a, &b| a.max(b))
}

/// Promote a real matrix to complex entries.
pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Combine real and imaginary parts into a complex matrix.
pub fn complex_from_parts(re: &RealMatrix, im: &RealMatrix) -> ComplexMatrix {
    assert_eq!(re.shape(), im.shape(), "real/imaginary shape mismatch");
    ComplexMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

pub fn re_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.re)
}

pub fn im_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.im)
}

/// Smallest eigenvalue of the Hermitian part `(m + m*) / 2`.
///
/// The input is symmetrized before solving, so tiny Hermitian deviations
/// from upstream arithmetic do not propagate into the verdict.
pub fn min_eig_hermitian(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    check_square_c(m)?;
    check_finite_c(m)?;
    if m.is_empty() {
        return Err(LinalgError::NonSquare { rows: 0, cols: 0 });
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    check_square_c(m)?;
    check_finite_c(m)?;
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Positive-semidefiniteness of the Hermitian part within tolerance:
/// `min_eig >= -(abs_eps + rel_eps * ||m||)`.
pub fn psd_check(m: &ComplexMatrix, tol: Tolerance) -> Result<bool, LinalgError> {
    check_square_c(m)?;
    check_finite_c(m)?;
    if m.is_empty() {
        return Ok(true);
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut min = f64::INFINITY;
    let mut scale = 0.0f64;
    for &v in eig.eigenvalues.iter() {
        min = min.min(v);
        scale = scale.max(v.abs());
    }
    Ok(min >= -tol.band(scale))
}

/// `psd_check` for a real symmetric matrix.
pub fn psd_check_real(m: &RealMatrix, tol: Tolerance) -> Result<bool, LinalgError> {
    psd_check(&to_complex(m), tol)
}

/// Matrix exponential by scaling-and-squaring with a Pade approximant.
pub fn expm(m: &RealMatrix) -> Result<RealMatrix, LinalgError> {
    check_square(m)?;
    check_finite(m)?;
    if m.is_empty() {
        return Ok(m.clone());
    }
    let e = m.exp();
    if e.iter().all(|x| x.is_finite()) {
        Ok(e)
    } else {
        Err(LinalgError::Overflow)
    }
}

/// Numerical rank: singular values above `abs_eps + rel_eps * sigma_max`.
pub fn rank(m: &RealMatrix, tol: Tolerance) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let band = tol.band(smax);
    sv.iter().filter(|&&s| s > band).count()
}

/// Orthonormal basis of the kernel (columns), from the SVD.
pub fn kernel_onb(m: &RealMatrix, tol: Tolerance) -> RealMatrix {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let band = tol.band(smax);
    let vt = svd.v_t.expect("svd requested v_t");
    let mut cols: Vec<usize> = Vec::new();
    for j in 0..n {
        let s = if j < sv.len() { sv[j] } else { 0.0 };
        if s <= band {
            cols.push(j);
        }
    }
    let mut out = RealMatrix::zeros(n, cols.len());
    for (k, &j) in cols.iter().enumerate() {
        out.set_column(k, &vt.row(j).transpose());
    }
    out
}

/// Orthonormal basis of the range (columns), from the SVD.
pub fn range_onb(m: &RealMatrix, tol: Tolerance) -> RealMatrix {
    let svd = m.clone().svd(true, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let band = tol.band(smax);
    let u = svd.u.expect("svd requested u");
    let r = sv.iter().filter(|&&s| s > band).count();
    u.columns(0, r).into_owned()
}

/// Extend an orthonormal set of columns to a full orthonormal basis; returns
/// the complementary columns.
pub fn orthonormal_complement(q: &RealMatrix) -> RealMatrix {
    let n = q.nrows();
    let k = q.ncols();
    if k >= n {
        return RealMatrix::zeros(n, 0);
    }
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n - k);
    for j in 0..n {
        if cols.len() == n - k {
            break;
        }
        let mut v = nalgebra::DVector::zeros(n);
        v[j] = 1.0;
        // Two rounds of Gram-Schmidt against q and the accepted columns.
        for _ in 0..2 {
            let proj = q * (q.transpose() * &v);
            v -= proj;
            for c in &cols {
                let d = c.dot(&v);
                v -= c * d;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    assert_eq!(cols.len(), n - k, "orthonormal completion failed");
    RealMatrix::from_columns(&cols)
}

/// Left polar decomposition `s = P * O` with `P = (s s^T)^{1/2}` symmetric
/// positive definite and `O` orthogonal. Errors on singular input.
pub fn polar(s: &RealMatrix, tol: Tolerance) -> Result<(RealMatrix, RealMatrix), LinalgError> {
    check_square(s)?;
    check_finite(s)?;
    let svd = s.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let smin = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if smin <= tol.band(smax) {
        return Err(LinalgError::Singular);
    }
    let u = svd.u.as_ref().expect("svd u");
    let vt = svd.v_t.as_ref().expect("svd v_t");
    let p = u * RealMatrix::from_diagonal(sv) * u.transpose();
    let o = u * vt;
    Ok((((&p + p.transpose()).scale(0.5)), o))
}
