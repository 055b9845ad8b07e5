//! The Gaussian channel algebra: complete positivity, composition, the
//! matrix-semigroup embedding, state action and reversibility.
//!
//! A channel on `n` modes is the pair `(X, Y)` of real `2n x 2n` matrices
//! acting on moments as `d -> X d`, `G -> X G X^T + Y`. Complete positivity
//! is the Hermitian inequality `Y + i (X sigma X^T - sigma) >= 0` in the
//! interleaved ordering `(q_1, p_1, ..., q_n, p_n)`.

use thiserror::Error;

use crate::linalg::{
    self, psd_check, spectral_norm, symplectic_form, ComplexMatrix, LinalgError, RealMatrix,
    Tolerance,
};

mod idempotent;
mod pmap;

pub use idempotent::IdempotentNormalForm;
pub use pmap::{channel_from_positive, class_min_eig, p_map_norm, Division, PositiveClassRep};

/// Errors from channel construction and the channel algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("pair (X, Y) violates complete positivity")]
    NotCompletelyPositive,
    #[error("matrix is not positive semidefinite within tolerance")]
    NotPsd,
    #[error("covariance matrix violates the uncertainty bound")]
    InvalidCovariance,
    #[error("channel is reversible; no non-trivial division exists")]
    Reversible,
    #[error("channel is not idempotent")]
    NotIdempotent,
    #[error("noise is degenerate on the preparation subspace")]
    DegenerateNoise,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Complete-positivity test for a candidate pair `(x, y)`:
/// `psd_check(y + i (x sigma x^T - sigma))`.
pub fn cp_check(x: &RealMatrix, y: &RealMatrix, tol: Tolerance) -> Result<bool, ChannelError> {
    let d = square_even(x)?;
    if square_even(y)? != d {
        return Err(ChannelError::DimensionMismatch(format!(
            "x is {d}x{d} but y is {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    if (y - y.transpose()).norm() > tol.band(spectral_norm(y).max(1.0)) {
        return Err(ChannelError::NotSymmetric);
    }
    Ok(psd_check(&cp_witness(x, y), tol)?)
}

/// The Hermitian matrix whose positivity is complete positivity:
/// `y + i (x sigma x^T - sigma)`.
pub fn cp_witness(x: &RealMatrix, y: &RealMatrix) -> ComplexMatrix {
    let sigma = symplectic_form(x.nrows() / 2);
    let im = x * &sigma * x.transpose() - &sigma;
    linalg::complex_from_parts(y, &im)
}

fn square_even(m: &RealMatrix) -> Result<usize, ChannelError> {
    if m.nrows() != m.ncols() {
        return Err(ChannelError::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(ChannelError::DimensionMismatch(format!(
            "phase space dimension must be a positive even number, got {}",
            m.nrows()
        )));
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(ChannelError::NumericalFailure("non-finite matrix entries".into()));
    }
    Ok(m.nrows())
}

/// A Gaussian channel `(X, Y)`, validated at construction.
#[derive(Debug, Clone)]
pub struct GaussianChannel {
    modes: usize,
    x: RealMatrix,
    y: RealMatrix,
}

impl GaussianChannel {
    /// Validate symmetry of `Y` and complete positivity, then wrap.
    pub fn new(x: RealMatrix, y: RealMatrix, tol: Tolerance) -> Result<Self, ChannelError> {
        if !cp_check(&x, &y, tol)? {
            return Err(ChannelError::NotCompletelyPositive);
        }
        let modes = x.nrows() / 2;
        let y = (&y + y.transpose()).scale(0.5);
        Ok(GaussianChannel { modes, x, y })
    }

    /// Internal constructor for channels that are completely positive by
    /// construction; positivity is still asserted in debug builds.
    pub(crate) fn from_parts_unchecked(x: RealMatrix, y: RealMatrix) -> Self {
        debug_assert_eq!(x.nrows(), x.ncols());
        debug_assert_eq!(x.shape(), y.shape());
        debug_assert!(
            psd_check(&cp_witness(&x, &y), Tolerance { abs_eps: 1e-7, rel_eps: 1e-7 })
                .unwrap_or(false),
            "constructed channel violates complete positivity"
        );
        let modes = x.nrows() / 2;
        let y = (&y + y.transpose()).scale(0.5);
        GaussianChannel { modes, x, y }
    }

    pub fn identity(modes: usize) -> Self {
        let d = 2 * modes;
        GaussianChannel {
            modes,
            x: RealMatrix::identity(d, d),
            y: RealMatrix::zeros(d, d),
        }
    }

    /// Attenuation (`0 < eta < 1`) or amplification (`eta > 1`) channel:
    /// `X = sqrt(eta) I`, `Y = |1 - eta| I`.
    pub fn attenuation(modes: usize, eta: f64) -> Result<Self, ChannelError> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(ChannelError::NumericalFailure(format!(
                "attenuation parameter must be positive, got {eta}"
            )));
        }
        let d = 2 * modes;
        let x = RealMatrix::identity(d, d).scale(eta.sqrt());
        let y = RealMatrix::identity(d, d).scale((1.0 - eta).abs());
        GaussianChannel::new(x, y, Tolerance::default())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn x(&self) -> &RealMatrix {
        &self.x
    }

    pub fn y(&self) -> &RealMatrix {
        &self.y
    }

    pub fn sigma(&self) -> RealMatrix {
        symplectic_form(self.modes)
    }

    /// Semigroup product `(x1 x2, y1 + x1 y2 x1^T)`.
    ///
    /// Heisenberg-picture order: in `c1.compose(&c2)` the signal first goes
    /// through `c2` and then through `c1`.
    pub fn compose(&self, other: &GaussianChannel) -> Result<GaussianChannel, ChannelError> {
        if self.modes != other.modes {
            return Err(ChannelError::DimensionMismatch(format!(
                "cannot compose channels on {} and {} modes",
                self.modes, other.modes
            )));
        }
        let x = &self.x * &other.x;
        let y = &self.y + &self.x * &other.y * self.x.transpose();
        Ok(GaussianChannel::from_parts_unchecked(x, y))
    }

    /// Moment action `d -> X d`, `G -> X G X^T + Y`.
    pub fn apply_to_state(&self, state: &GaussianState) -> Result<GaussianState, ChannelError> {
        if self.modes != state.modes {
            return Err(ChannelError::DimensionMismatch(format!(
                "channel on {} modes applied to state on {} modes",
                self.modes, state.modes
            )));
        }
        let mean = &self.x * &state.mean;
        let cov = &self.x * &state.cov * self.x.transpose() + &self.y;
        Ok(GaussianState::from_parts_unchecked(mean, cov))
    }

    /// Injective homomorphism into real matrices of dimension
    /// `4n^2 + 2n + 1`: block matrix `[[x (x) x, vec(y), 0], [0, 1, 0],
    /// [0, 0, x]]` with row-major `vec`.
    pub fn embed_pi(&self) -> RealMatrix {
        let d = 2 * self.modes;
        let dim = d * d + 1 + d;
        let mut out = RealMatrix::zeros(dim, dim);
        let xx = crate::linalg::kron_product(&self.x, &self.x);
        out.view_mut((0, 0), (d * d, d * d)).copy_from(&xx);
        for i in 0..d {
            for j in 0..d {
                out[(i * d + j, d * d)] = self.y[(i, j)];
            }
        }
        out[(d * d, d * d)] = 1.0;
        out.view_mut((d * d + 1, d * d + 1), (d, d)).copy_from(&self.x);
        out
    }

    /// Reversible iff `X` is symplectic and `Y = 0` within tolerance.
    pub fn is_reversible(&self, tol: Tolerance) -> bool {
        let sigma = self.sigma();
        let symp = &self.x * &sigma * self.x.transpose() - &sigma;
        let xs = spectral_norm(&self.x);
        symp.norm() <= tol.band((xs * xs).max(1.0)) && self.y.norm() <= tol.band(1.0)
    }

    /// Idempotency: `X^2 = X` and `X Y = 0` within tolerance.
    pub fn is_idempotent(&self, tol: Tolerance) -> bool {
        let x2 = &self.x * &self.x - &self.x;
        let xy = &self.x * &self.y;
        x2.norm() <= tol.band(spectral_norm(&self.x).max(1.0))
            && xy.norm() <= tol.band(spectral_norm(&self.y).max(1.0))
    }

    /// Image under the p-map `i (X sigma X^T - sigma) + Y`.
    pub fn p_map(&self) -> PositiveClassRep {
        pmap::p_map(self)
    }

    /// Split into two non-reversible factors.
    ///
    /// Singular `X` takes the kernel-projector branch; otherwise the p-image
    /// is scaled by the first `eps` in `1/2, 1/4, ...` that keeps the left
    /// factor nonsingular.
    pub fn divide(&self, tol: Tolerance) -> Result<Division, ChannelError> {
        pmap::divide(self, tol, None)
    }

    /// `divide` with a fixed epsilon instead of the downward search.
    pub fn divide_with_epsilon(
        &self,
        tol: Tolerance,
        epsilon: f64,
    ) -> Result<Division, ChannelError> {
        pmap::divide(self, tol, Some(epsilon))
    }

    /// Symplectic normal form of an idempotent channel: identity on `2k`
    /// coordinates, preparation noise `y_j >= 1` on the rest.
    pub fn idempotent_normal_form(&self, tol: Tolerance) -> Result<IdempotentNormalForm, ChannelError> {
        idempotent::idempotent_normal_form(self, tol)
    }
}

/// A Gaussian state: mean vector and covariance matrix with
/// `cov + i sigma >= 0`.
#[derive(Debug, Clone)]
pub struct GaussianState {
    modes: usize,
    mean: nalgebra::DVector<f64>,
    cov: RealMatrix,
}

impl GaussianState {
    pub fn new(
        mean: nalgebra::DVector<f64>,
        cov: RealMatrix,
        tol: Tolerance,
    ) -> Result<Self, ChannelError> {
        let d = square_even(&cov)?;
        if mean.len() != d {
            return Err(ChannelError::DimensionMismatch(format!(
                "mean has length {}, covariance is {d}x{d}",
                mean.len()
            )));
        }
        if (&cov - cov.transpose()).norm() > tol.band(spectral_norm(&cov).max(1.0)) {
            return Err(ChannelError::NotSymmetric);
        }
        if !mean.iter().all(|v| v.is_finite()) {
            return Err(ChannelError::NumericalFailure("non-finite mean".into()));
        }
        let sigma = symplectic_form(d / 2);
        let witness = linalg::complex_from_parts(&cov, &sigma);
        if !psd_check(&witness, tol)? {
            return Err(ChannelError::InvalidCovariance);
        }
        Ok(GaussianState { modes: d / 2, mean, cov })
    }

    fn from_parts_unchecked(mean: nalgebra::DVector<f64>, cov: RealMatrix) -> Self {
        let modes = cov.nrows() / 2;
        GaussianState { modes, mean, cov: (&cov + cov.transpose()).scale(0.5) }
    }

    /// Vacuum: zero mean, identity covariance.
    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            modes,
            mean: nalgebra::DVector::zeros(2 * modes),
            cov: RealMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &nalgebra::DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &RealMatrix {
        &self.cov
    }

    /// Covariance admissibility `cov + i sigma >= 0` as a reusable check.
    pub fn is_valid_covariance(cov: &RealMatrix, tol: Tolerance) -> Result<bool, ChannelError> {
        let d = square_even(cov)?;
        let sigma = symplectic_form(d / 2);
        Ok(psd_check(&linalg::complex_from_parts(cov, &sigma), tol)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn cp_check_identity_and_preparation() {
        let eye = RealMatrix::identity(2, 2);
        let zero = RealMatrix::zeros(2, 2);
        assert!(cp_check(&eye, &zero, tol()).unwrap());
        // X = 0 prepares a state with covariance Y; Y = I is the vacuum.
        assert!(cp_check(&zero, &eye, tol()).unwrap());
        // Negative noise on a symplectic X fails.
        assert!(!cp_check(&eye, &eye.scale(-0.1), tol()).unwrap());
    }

    #[test]
    fn cp_check_rejects_asymmetric_noise() {
        let eye = RealMatrix::identity(2, 2);
        let bad = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(cp_check(&eye, &bad, tol()).unwrap_err(), ChannelError::NotSymmetric);
    }

    #[test]
    fn compose_with_identity() {
        let c = GaussianChannel::attenuation(1, 0.5).unwrap();
        let id = GaussianChannel::identity(1);
        let left = id.compose(&c).unwrap();
        let right = c.compose(&id).unwrap();
        assert!((left.x() - c.x()).norm() < 1e-15);
        assert!((left.y() - c.y()).norm() < 1e-15);
        assert!((right.x() - c.x()).norm() < 1e-15);
        assert!((right.y() - c.y()).norm() < 1e-15);
    }

    #[test]
    fn attenuations_compose_multiplicatively() {
        let c1 = GaussianChannel::attenuation(1, 0.5).unwrap();
        let c2 = GaussianChannel::attenuation(1, 0.25).unwrap();
        let c = c1.compose(&c2).unwrap();
        let expected = GaussianChannel::attenuation(1, 0.125).unwrap();
        assert!((c.x() - expected.x()).norm() < 1e-12);
        assert!((c.y() - expected.y()).norm() < 1e-12);
    }

    #[test]
    fn apply_identity_keeps_state() {
        let id = GaussianChannel::identity(2);
        let s = GaussianState::vacuum(2);
        let out = id.apply_to_state(&s).unwrap();
        assert!((out.cov() - s.cov()).norm() < 1e-15);
        assert_eq!(out.mean().len(), 4);
    }

    #[test]
    fn preparation_is_input_independent() {
        let y0 = RealMatrix::identity(2, 2).scale(2.0);
        let prep = GaussianChannel::new(RealMatrix::zeros(2, 2), y0.clone(), tol()).unwrap();
        let squeezed = GaussianState::new(
            nalgebra::DVector::from_vec(vec![1.0, -0.5]),
            RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 0.25])),
            tol(),
        )
        .unwrap();
        let out = prep.apply_to_state(&squeezed).unwrap();
        assert!(out.mean().norm() < 1e-15);
        assert!((out.cov() - &y0).norm() < 1e-15);
    }

    #[test]
    fn attenuation_fixes_vacuum() {
        let c = GaussianChannel::attenuation(1, 0.5).unwrap();
        let out = c.apply_to_state(&GaussianState::vacuum(1)).unwrap();
        assert!((out.cov() - RealMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn reversibility_verdicts() {
        let th = 0.37f64;
        let rot = RealMatrix::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
        let rev = GaussianChannel::new(rot, RealMatrix::zeros(2, 2), tol()).unwrap();
        assert!(rev.is_reversible(tol()));

        let att = GaussianChannel::attenuation(1, 0.3).unwrap();
        assert!(!att.is_reversible(tol()));

        // Squeezing is symplectic: SxS^T = sigma for diag(2, 1/2).
        let sq = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        let sigma = symplectic_form(1);
        assert!((&sq * &sigma * sq.transpose() - &sigma).norm() < 1e-15);
        let sqz = GaussianChannel::new(sq, RealMatrix::zeros(2, 2), tol()).unwrap();
        assert!(sqz.is_reversible(tol()));
    }

    #[test]
    fn embed_pi_identity_blocks() {
        let id = GaussianChannel::identity(1);
        let pi = id.embed_pi();
        assert_eq!(pi.nrows(), 4 + 1 + 2);
        assert!((pi.clone() - RealMatrix::identity(7, 7)).norm() < 1e-15);
    }

    use crate::testutil::random_channel;

    #[test]
    fn embed_pi_is_homomorphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let n = 1 + rng.random_range(0..2usize);
            let c1 = random_channel(&mut rng, n);
            let c2 = random_channel(&mut rng, n);
            let lhs = c1.compose(&c2).unwrap().embed_pi();
            let rhs = c1.embed_pi() * c2.embed_pi();
            assert!((&lhs - &rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn embed_pi_distinguishes_channels() {
        let a = GaussianChannel::attenuation(1, 0.5).unwrap();
        let b = GaussianChannel::attenuation(1, 0.6).unwrap();
        assert!((a.embed_pi() - b.embed_pi()).norm() > 1e-3);
    }

    #[test]
    fn composition_is_associative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = 1 + rng.random_range(0..2usize);
            let c1 = random_channel(&mut rng, n);
            let c2 = random_channel(&mut rng, n);
            let c3 = random_channel(&mut rng, n);
            let left = c1.compose(&c2).unwrap().compose(&c3).unwrap();
            let right = c1.compose(&c2.compose(&c3).unwrap()).unwrap();
            let scale = right.y().norm().max(1.0);
            assert!((left.x() - right.x()).norm() <= 1e-9 * scale);
            assert!((left.y() - right.y()).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn composition_preserves_cp() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let n = 1 + rng.random_range(0..2usize);
            let c = random_channel(&mut rng, n).compose(&random_channel(&mut rng, n)).unwrap();
            assert!(cp_check(c.x(), c.y(), tol()).unwrap());
        }
    }
}
