//! Membership of a matrix in a one-parameter Gaussian semigroup and the
//! two-factor splitting of symplectic matrices.

use crate::linalg::{
    polar, real_log, real_log_exists, spectral_norm, symplectic_form, JordanNegativeReport,
    LinalgError, RealMatrix, Tolerance,
};

use super::{hamiltonian_split, inf_norm, Generator, SemigroupError};

/// Verdict for embeddability questions. `Yes` carries a generator witness,
/// `No` the violated Jordan structure, `Indeterminate` the reason the
/// criterion does not apply.
#[derive(Debug, Clone)]
pub enum EmbeddabilityVerdict {
    Yes { witness: Generator },
    No { jordan: Vec<JordanNegativeReport> },
    Indeterminate { reason: String },
}

impl EmbeddabilityVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, EmbeddabilityVerdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, EmbeddabilityVerdict::No { .. })
    }

    pub fn witness(&self) -> Option<&Generator> {
        match self {
            EmbeddabilityVerdict::Yes { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Can `x` appear in an element of a one-parameter Gaussian semigroup?
///
/// Yes iff `x` has a real logarithm `L`; the witness splits
/// `L sigma^T = A - H` and takes `B = ||A||_inf I`, which satisfies
/// `i A + B >= 0`. Rank ambiguities surface as `Indeterminate`.
pub fn embeddable_x(x: &RealMatrix, tol: Tolerance) -> Result<EmbeddabilityVerdict, SemigroupError> {
    if x.nrows() != x.ncols() || x.nrows() == 0 || !x.nrows().is_multiple_of(2) {
        return Err(SemigroupError::InvalidGenerator(format!(
            "expected a square matrix of even dimension, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let (exists, reports) = match real_log_exists(x, tol) {
        Ok(res) => res,
        Err(LinalgError::IllConditioned(reason)) => {
            return Ok(EmbeddabilityVerdict::Indeterminate { reason })
        }
        Err(e) => return Err(e.into()),
    };
    if !exists {
        return Ok(EmbeddabilityVerdict::No { jordan: reports });
    }
    let log = match real_log(x, tol) {
        Ok(l) => l,
        Err(LinalgError::IllConditioned(reason)) => {
            return Ok(EmbeddabilityVerdict::Indeterminate { reason })
        }
        Err(e) => return Err(e.into()),
    };
    let (a, h) = hamiltonian_split(&log, x.nrows() / 2);
    let b = RealMatrix::identity(x.nrows(), x.nrows()).scale(inf_norm(&a));
    let witness = Generator::new(a, b, h, tol)?;
    Ok(EmbeddabilityVerdict::Yes { witness })
}

/// Partial criterion for membership in `exp(sp(2n))`: away from eigenvalue
/// `-1`, membership is equivalent to the existence of a real logarithm; a
/// spectrum touching `-1` is reported as indeterminate (the full
/// characterization is out of scope).
pub fn in_exp_sp(s: &RealMatrix, tol: Tolerance) -> Result<EmbeddabilityVerdict, SemigroupError> {
    check_symplectic(s, tol)?;
    let scale = spectral_norm(s).max(1.0);
    let near_minus_one = s
        .complex_eigenvalues()
        .iter()
        .any(|z| (z.re + 1.0).abs() <= tol.band(scale).max(1e-9) && z.im.abs() <= tol.band(scale).max(1e-9));
    if near_minus_one {
        return Ok(EmbeddabilityVerdict::Indeterminate {
            reason: "-1 is in the spectrum within tolerance; the partial criterion does not apply"
                .into(),
        });
    }
    embeddable_x(s, tol)
}

/// Split a symplectic matrix into a positive-definite and an orthogonal
/// symplectic factor, `s = P * O`; each factor lies in `exp(sp(2n))`.
pub fn split_exp_sp(
    s: &RealMatrix,
    tol: Tolerance,
) -> Result<(RealMatrix, RealMatrix), SemigroupError> {
    check_symplectic(s, tol)?;
    let (p, o) = polar(s, tol)?;
    let sigma = symplectic_form(s.nrows() / 2);
    let scale = spectral_norm(s).max(1.0);
    let p_resid = (&p * &sigma * p.transpose() - &sigma).norm();
    let o_resid = (&o * &sigma * o.transpose() - &sigma).norm();
    if p_resid > 1e-8 * scale * scale || o_resid > 1e-8 * scale * scale {
        return Err(SemigroupError::Indeterminate(format!(
            "polar factors drift off the symplectic group: {p_resid:.2e}, {o_resid:.2e}"
        )));
    }
    Ok((p, o))
}

fn check_symplectic(s: &RealMatrix, tol: Tolerance) -> Result<(), SemigroupError> {
    if s.nrows() != s.ncols() || s.nrows() == 0 || !s.nrows().is_multiple_of(2) {
        return Err(SemigroupError::NotSymplectic);
    }
    let sigma = symplectic_form(s.nrows() / 2);
    let resid = (s * &sigma * s.transpose() - &sigma).norm();
    let xs = spectral_norm(s);
    if resid > tol.band((xs * xs).max(1.0)) {
        return Err(SemigroupError::NotSymplectic);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use crate::testutil::random_symplectic;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn contraction_embeds_with_witness() {
        let x = RealMatrix::identity(2, 2).scale((-1.0f64).exp());
        let v = embeddable_x(&x, tol()).unwrap();
        let witness = v.witness().expect("expected Yes");
        let c = witness.evolve(1.0).unwrap();
        assert!((c.x() - &x).norm() <= 1e-6 * x.norm());
    }

    #[test]
    fn odd_negative_pairing_is_rejected() {
        let x = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -2.0]));
        let v = embeddable_x(&x, tol()).unwrap();
        match v {
            EmbeddabilityVerdict::No { jordan } => {
                assert_eq!(jordan.len(), 2);
                assert!(jordan.iter().all(|r| r.block_sizes == vec![1]));
            }
            other => panic!("expected No, got {other:?}"),
        }
    }

    #[test]
    fn minus_identity_embeds() {
        let x = -RealMatrix::identity(2, 2);
        let v = embeddable_x(&x, tol()).unwrap();
        let witness = v.witness().expect("rotation generator expected");
        let c = witness.evolve(1.0).unwrap();
        assert!((c.x() - &x).norm() < 1e-6);
    }

    #[test]
    fn positive_symplectic_is_in_exp_sp() {
        let s = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        assert!(in_exp_sp(&s, tol()).unwrap().is_yes());
    }

    #[test]
    fn minus_identity_triggers_partial_criterion_guard() {
        let s = -RealMatrix::identity(2, 2);
        assert!(matches!(
            in_exp_sp(&s, tol()).unwrap(),
            EmbeddabilityVerdict::Indeterminate { .. }
        ));
        // embeddable_x still certifies the rotation witness.
        assert!(embeddable_x(&s, tol()).unwrap().is_yes());
    }

    #[test]
    fn random_orthogonal_symplectic_embeds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let modes = 1 + rng.random_range(0..2usize);
            let s = random_symplectic(&mut rng, modes, 2);
            let (_, o) = split_exp_sp(&s, tol()).unwrap();
            let v = embeddable_x(&o, tol()).unwrap();
            assert!(v.is_yes(), "orthogonal symplectic should embed");
        }
    }

    #[test]
    fn in_exp_sp_rejects_non_symplectic() {
        let s = RealMatrix::identity(2, 2).scale(2.0);
        assert_eq!(in_exp_sp(&s, tol()).unwrap_err(), SemigroupError::NotSymplectic);
    }

    #[test]
    fn negative_squeezing_is_not_in_exp_sp() {
        // diag(-2, -1/2) is symplectic, avoids eigenvalue -1, and has odd
        // Jordan pairings at both negative eigenvalues.
        let s = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-2.0, -0.5]));
        let sigma = symplectic_form(1);
        assert!((&s * &sigma * s.transpose() - &sigma).norm() < 1e-15);
        assert!(in_exp_sp(&s, tol()).unwrap().is_no());
    }

    #[test]
    fn split_trivial_cases() {
        // Positive symplectic: (s, I).
        let s = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        let (p, o) = split_exp_sp(&s, tol()).unwrap();
        assert!((p - &s).norm() < 1e-10);
        assert!((o - RealMatrix::identity(2, 2)).norm() < 1e-10);

        // Orthogonal symplectic: (I, s).
        let th = 0.4f64;
        let rot = RealMatrix::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
        let (p, o) = split_exp_sp(&rot, tol()).unwrap();
        assert!((p - RealMatrix::identity(2, 2)).norm() < 1e-10);
        assert!((o - &rot).norm() < 1e-10);
    }

    #[test]
    fn split_random_symplectic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        for _ in 0..15 {
            let modes = 1 + rng.random_range(0..3usize);
            let s = random_symplectic(&mut rng, modes, 2);
            let (p, o) = split_exp_sp(&s, tol()).unwrap();
            assert!((&p * &o - &s).norm() <= 1e-8 * s.norm().max(1.0));
            // Both factors have real logarithms (positivity / compactness).
            assert!(real_log_exists(&p, tol()).unwrap().0);
            let lo = real_log(&o, tol()).unwrap();
            assert!((expm(&lo).unwrap() - &o).norm() <= 1e-6 * o.norm().max(1.0));
        }
    }
}
