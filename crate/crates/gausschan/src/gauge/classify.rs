//! Polar splitting and classification of gauge-covariant channels by the
//! spectrum of the positive polar factor.

use num_complex::Complex64;

use crate::linalg::{psd_check, spectral_norm_c, ComplexMatrix, RealMatrix, Tolerance};
use crate::semigroup::{embeddable_x, EmbeddabilityVerdict, Generator, SemigroupError};

use super::{unhat, unhat_matrix, GaugeChannel, GaugeError};

/// The basic cases by the spectrum of `K^ = sqrt(x^ x^*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeCase {
    /// (i) `K^ = 0`: state preparation, idempotent for any `Y^ >= I`.
    StatePreparation,
    /// (ii) `0 < K^ < I`: one-parameter semigroup with bounded noise and an
    /// invariant state.
    ContractiveWithInvariant,
    /// (iii) `K^ = I`: additive classical noise, semigroup `(I, t Y)`.
    AdditiveNoise,
    /// (iv) `K^ > I`: amplifying semigroup, unbounded noise, no invariant
    /// state.
    Amplifying,
    /// Spectrum spans several bands.
    Mixed,
}

/// Classification of one commuting spectral block in the mixed case.
#[derive(Debug, Clone)]
pub struct GaugeBlock {
    pub case: GaugeCase,
    pub eigenvalues: Vec<f64>,
    /// Invariant covariance (case ii) or anchor (case iv), in the block's
    /// own eigenbasis coordinates.
    pub invariant_cov: Option<ComplexMatrix>,
    pub anchor: Option<ComplexMatrix>,
}

/// Full classification report for a gauge-covariant channel.
#[derive(Debug, Clone)]
pub struct GaugeClassification {
    pub case: GaugeCase,
    pub unitary_factor: ComplexMatrix,
    pub k_hat: ComplexMatrix,
    pub invariant_cov: Option<ComplexMatrix>,
    pub anchor: Option<ComplexMatrix>,
    /// Eigenvalues of `K^`, ascending.
    pub spectrum: Vec<f64>,
    /// Per-band classification when the case is mixed and `[K^, Y^] = 0`;
    /// empty otherwise.
    pub blocks: Vec<GaugeBlock>,
}

/// Split off the reversible part: `x^ = K^ W` with `K^ = sqrt(x^ x^*)`
/// Hermitian PSD and `W` unitary; returns `((W, 0), (K^, y^))` and the
/// original channel is `compose(noisy, reversible)` — the signal passes
/// through the reversible part first.
pub fn polar_split(g: &GaugeChannel) -> Result<(GaugeChannel, GaugeChannel), GaugeError> {
    let n = g.modes();
    let svd = g.x_hat().clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd u");
    let vt = svd.v_t.as_ref().expect("svd v_t");
    let mut sing = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        sing[(j, j)] = Complex64::new(svd.singular_values[j], 0.0);
    }
    let k_hat = u * &sing * u.adjoint();
    let w = u * vt;
    let reversible = GaugeChannel::from_parts_unchecked(w, ComplexMatrix::zeros(n, n));
    let noisy = GaugeChannel::from_parts_unchecked(k_hat, g.y_hat().clone());
    Ok((reversible, noisy))
}

fn band_of(k: f64, tol_band: f64) -> GaugeCase {
    if k <= tol_band {
        GaugeCase::StatePreparation
    } else if k < 1.0 - tol_band {
        GaugeCase::ContractiveWithInvariant
    } else if k <= 1.0 + tol_band {
        GaugeCase::AdditiveNoise
    } else {
        GaugeCase::Amplifying
    }
}

/// The unique fixed point `Y0` of `Y^ = Y0 - K^ Y0 K^` in the eigenbasis of
/// `K^`: `nu_ij = y_ij / (1 - k_i k_j)`.
fn anchor_in_eigenbasis(y_basis: &ComplexMatrix, ks: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(ks.len(), ks.len(), |i, j| {
        y_basis[(i, j)] / Complex64::new(1.0 - ks[i] * ks[j], 0.0)
    })
}

/// Classify a pure-band block given in the eigenbasis of its `K^` part.
fn classify_block(
    case: GaugeCase,
    ks: &[f64],
    y_basis: &ComplexMatrix,
    tol: Tolerance,
) -> Result<GaugeBlock, GaugeError> {
    let m = ks.len();
    let eye = ComplexMatrix::identity(m, m);
    let mut block = GaugeBlock {
        case,
        eigenvalues: ks.to_vec(),
        invariant_cov: None,
        anchor: None,
    };
    match case {
        GaugeCase::StatePreparation => {
            // CP forces Y^ >= I on a zero block.
            if !psd_check(&(y_basis - &eye), tol)? {
                return Err(GaugeError::NotCp);
            }
        }
        GaugeCase::ContractiveWithInvariant => {
            let y0 = anchor_in_eigenbasis(y_basis, ks);
            if !psd_check(&(&y0 - &eye), tol)? {
                return Err(GaugeError::NotCp);
            }
            block.invariant_cov = Some(y0);
        }
        GaugeCase::AdditiveNoise => {
            if !psd_check(y_basis, tol)? {
                return Err(GaugeError::NotCp);
            }
        }
        GaugeCase::Amplifying => {
            let y0 = anchor_in_eigenbasis(y_basis, ks);
            // The anchor sits below -I here.
            if !psd_check(&(-&y0 - &eye), tol)? {
                return Err(GaugeError::NotCp);
            }
            block.anchor = Some(y0);
        }
        GaugeCase::Mixed => unreachable!("blocks are pure by construction"),
    }
    Ok(block)
}

/// Classify a gauge-covariant channel by the spectrum of its positive polar
/// factor: cases (i)-(iv) when the spectrum sits in one band, otherwise
/// `Mixed`, with a per-band sub-classification when `Y^` commutes with
/// `K^`.
pub fn classify(g: &GaugeChannel, tol: Tolerance) -> Result<GaugeClassification, GaugeError> {
    let n = g.modes();
    let (reversible, noisy) = polar_split(g)?;
    let k_hat = noisy.x_hat().clone();
    let y_hat = noisy.y_hat().clone();

    let eig = nalgebra::SymmetricEigen::new(k_hat.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let ks: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let mut basis = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        basis.set_column(col, &eig.eigenvectors.column(i));
    }
    let tol_band = tol.band(1.0);
    let cases: Vec<GaugeCase> = ks.iter().map(|&k| band_of(k, tol_band)).collect();
    let y_basis = basis.adjoint() * &y_hat * &basis;

    let mut out = GaugeClassification {
        case: GaugeCase::Mixed,
        unitary_factor: reversible.x_hat().clone(),
        k_hat: k_hat.clone(),
        invariant_cov: None,
        anchor: None,
        spectrum: ks.clone(),
        blocks: Vec::new(),
    };

    if cases.windows(2).all(|w| w[0] == w[1]) {
        let case = cases[0];
        let block = classify_block(case, &ks, &y_basis, tol)?;
        out.case = case;
        // Push the case-(ii)/(iv) data back to the original coordinates.
        out.invariant_cov = block.invariant_cov.map(|m| &basis * m * basis.adjoint());
        out.anchor = block.anchor.map(|m| &basis * m * basis.adjoint());
        return Ok(out);
    }

    // Mixed: decompose only when the noise commutes with K^.
    let commutator = &k_hat * &y_hat - &y_hat * &k_hat;
    if commutator.norm() > tol.band(spectral_norm_c(&y_hat).max(1.0)) {
        return Ok(out);
    }
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cases[end] == cases[start] {
            end += 1;
        }
        let idx: Vec<usize> = (start..end).collect();
        let sub_y = ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| y_basis[(idx[i], idx[j])]);
        let sub_k: Vec<f64> = idx.iter().map(|&i| ks[i]).collect();
        out.blocks.push(classify_block(cases[start], &sub_k, &sub_y, tol)?);
        start = end;
    }
    Ok(out)
}

/// Hermitian power `K^t` through the eigendecomposition.
fn hermitian_power(k: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let eig = nalgebra::SymmetricEigen::new(k.clone());
    let n = k.nrows();
    let mut d = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        d[(j, j)] = Complex64::new(eig.eigenvalues[j].max(0.0).powf(t), 0.0);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

fn hermitian_log(k: &ComplexMatrix) -> Option<ComplexMatrix> {
    let eig = nalgebra::SymmetricEigen::new(k.clone());
    let n = k.nrows();
    let mut d = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let lam = eig.eigenvalues[j];
        if lam <= 0.0 {
            return None;
        }
        d[(j, j)] = Complex64::new(lam.ln(), 0.0);
    }
    Some(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Membership of a gauge channel in a one-parameter Gaussian semigroup.
///
/// Pure cases (ii)-(iv) with a trivial unitary factor carry the explicit
/// semigroup `X^_t = K^t`, `Y^_t = Y0 - K^t Y0 K^t` (or `(I, t Y)` in case
/// iii); the witness generator is cross-checked against `evolve` at
/// `t = 0.5` and `t = 1`. Case (i) has singular `X` and no membership. A
/// nontrivial unitary factor routes through the phase-space embeddability
/// test.
pub fn gauge_semigroup_membership(
    g: &GaugeChannel,
    tol: Tolerance,
) -> Result<EmbeddabilityVerdict, GaugeError> {
    let n = g.modes();
    let classification = classify(g, tol)?;
    let eye = ComplexMatrix::identity(n, n);
    let unitary_trivial = (&classification.unitary_factor - &eye).norm() <= 1e-7 * (n as f64).sqrt();
    if !unitary_trivial {
        let c = unhat(g);
        return embeddable_x(c.x(), tol).map_err(semigroup_to_gauge);
    }
    match classification.case {
        GaugeCase::StatePreparation => Ok(EmbeddabilityVerdict::No { jordan: vec![] }),
        GaugeCase::Mixed => Ok(EmbeddabilityVerdict::Indeterminate {
            reason: "mixed spectral bands; no single semigroup form on this route".into(),
        }),
        GaugeCase::AdditiveNoise => {
            // Semigroup (I, t Y): zero drift, b = sigma Y sigma^T / 2.
            let y = unhat_matrix(g.y_hat());
            let d = 2 * n;
            let sigma = crate::linalg::symplectic_form(n);
            let b = (&sigma * &y * sigma.transpose()).scale(0.5);
            let gen = Generator::new(RealMatrix::zeros(d, d), b, RealMatrix::zeros(d, d), tol)
                .map_err(semigroup_to_gauge)?;
            verify_witness(g, &gen, tol)
        }
        GaugeCase::ContractiveWithInvariant | GaugeCase::Amplifying => {
            let Some(log_k) = hermitian_log(&classification.k_hat) else {
                return Ok(EmbeddabilityVerdict::Indeterminate {
                    reason: "polar factor has a zero eigenvalue inside a nonzero band".into(),
                });
            };
            let anchor_hat = classification
                .invariant_cov
                .clone()
                .or(classification.anchor.clone())
                .expect("pure cases ii/iv carry the fixed-point matrix");
            let f = unhat_matrix(&log_k);
            let y0 = unhat_matrix(&anchor_hat);
            let (a, h) = crate::semigroup::hamiltonian_split(&f, n);
            let sigma = crate::linalg::symplectic_form(n);
            // From Y_t = Y0 - X_t Y0 X_t^T: dY/dt|_0 = -(f Y0 + Y0 f^T) = 2 sigma^T b sigma.
            let rate = -(&f * &y0 + &y0 * f.transpose());
            let b = (&sigma * rate * sigma.transpose()).scale(0.5);
            let gen = Generator::new(a, b, h, tol).map_err(semigroup_to_gauge)?;
            verify_witness(g, &gen, tol)
        }
    }
}

fn verify_witness(
    g: &GaugeChannel,
    gen: &Generator,
    tol: Tolerance,
) -> Result<EmbeddabilityVerdict, GaugeError> {
    let target = unhat(g);
    for &t in &[0.5, 1.0] {
        let evolved = gen.evolve(t).map_err(semigroup_to_gauge)?;
        let xk = hermitian_power(&super::hat_matrix(target.x(), tol)?, t);
        let x_expect = unhat_matrix(&xk);
        if (evolved.x() - &x_expect).norm() > 1e-6 * x_expect.norm().max(1.0) {
            return Ok(EmbeddabilityVerdict::Indeterminate {
                reason: format!("witness drift mismatch at t = {t}"),
            });
        }
    }
    let evolved = gen.evolve(1.0).map_err(semigroup_to_gauge)?;
    if (evolved.y() - target.y()).norm() > 1e-6 * target.y().norm().max(1.0) {
        return Ok(EmbeddabilityVerdict::Indeterminate {
            reason: "witness noise mismatch at t = 1".into(),
        });
    }
    Ok(EmbeddabilityVerdict::Yes { witness: gen.clone() })
}

fn semigroup_to_gauge(e: SemigroupError) -> GaugeError {
    match e {
        SemigroupError::Linalg(l) => GaugeError::Linalg(l),
        SemigroupError::Channel(c) => GaugeError::Channel(c),
        other => GaugeError::NotGaugeCovariant(other.to_string()),
    }
}
