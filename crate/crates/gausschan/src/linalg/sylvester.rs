//! Sylvester-type linear matrix equations via the Kronecker-sum
//! vectorization, sized for the small phase-space dimensions of this crate.

use super::{check_finite, check_square, LinalgError, RealMatrix, Tolerance};

/// Row-major vectorization matching `<e_i (x) e_j, vec(Y)> = <e_i, Y e_j>`.
fn vec_rm(m: &RealMatrix) -> nalgebra::DVector<f64> {
    let (r, c) = m.shape();
    let mut v = nalgebra::DVector::zeros(r * c);
    for i in 0..r {
        for j in 0..c {
            v[i * c + j] = m[(i, j)];
        }
    }
    v
}

fn unvec_rm(v: &nalgebra::DVector<f64>, rows: usize, cols: usize) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Kronecker product, row-major conventions throughout.
pub fn kron_product(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    a.kronecker(b)
}

/// Solve `a Z + Z b = c` with `a` of size `k x k`, `b` of size `m x m` and
/// `c`, `Z` of size `k x m`.
///
/// In row-major vectorization the system reads
/// `(a (x) I_m + I_k (x) b^T) vec(Z) = vec(c)`.
pub fn sylvester_solve(
    a: &RealMatrix,
    b: &RealMatrix,
    c: &RealMatrix,
    tol: Tolerance,
) -> Result<RealMatrix, LinalgError> {
    let k = check_square(a)?;
    let m = check_square(b)?;
    if c.nrows() != k || c.ncols() != m {
        return Err(LinalgError::DimensionMismatch(format!(
            "sylvester rhs must be {k}x{m}, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    check_finite(a)?;
    check_finite(b)?;
    check_finite(c)?;
    let kmat = kron_product(a, &RealMatrix::identity(m, m))
        + kron_product(&RealMatrix::identity(k, k), &b.transpose());
    let svd = kmat.svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let smin = svd.singular_values.iter().fold(f64::INFINITY, |acc, &s| acc.min(s));
    if smin <= tol.band(smax) {
        return Err(LinalgError::Singular);
    }
    let z = svd
        .solve(&vec_rm(c), 0.0)
        .map_err(|_| LinalgError::Singular)?;
    Ok(unvec_rm(&z, k, m))
}

/// Solve the Lyapunov-type equation `a Z + Z a^T = rhs` on the Kronecker-sum
/// vectorization. When `rhs` is symmetric the solution is symmetrized, which
/// is again a solution.
///
/// A singular Kronecker sum means some eigenvalue pair of `a` satisfies
/// `lambda_i + lambda_j = 0`; that is reported, never regularized.
pub fn kron_sum_solve(
    a: &RealMatrix,
    rhs: &RealMatrix,
    tol: Tolerance,
) -> Result<RealMatrix, LinalgError> {
    let n = check_square(a)?;
    if check_square(rhs)? != n {
        return Err(LinalgError::DimensionMismatch(
            "kron_sum_solve needs operands of one square dimension".into(),
        ));
    }
    let z = match sylvester_solve(a, &a.transpose(), rhs, tol) {
        Ok(z) => z,
        Err(LinalgError::Singular) => return Err(LinalgError::SingularKroneckerSum),
        Err(e) => return Err(e),
    };
    let sym_resid = (rhs - rhs.transpose()).norm();
    if sym_resid <= tol.band(rhs.norm().max(1.0)) {
        Ok((&z + z.transpose()).scale(0.5))
    } else {
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_case() {
        let tol = Tolerance::default();
        let a = RealMatrix::identity(2, 2);
        let rhs = RealMatrix::identity(2, 2).scale(2.0);
        let z = kron_sum_solve(&a, &rhs, tol).unwrap();
        assert!((z - RealMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_case_direct_substitution() {
        let tol = Tolerance::default();
        let a = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let rhs = RealMatrix::identity(2, 2);
        let z = kron_sum_solve(&a, &rhs, tol).unwrap();
        // a Z + Z a^T = I gives Z = diag(1/2, 1/4).
        assert!((z[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((z[(1, 1)] - 0.25).abs() < 1e-12);
        assert!(z[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn opposite_eigenvalues_are_singular() {
        let tol = Tolerance::default();
        let a = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        let rhs = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(
            kron_sum_solve(&a, &rhs, tol).unwrap_err(),
            LinalgError::SingularKroneckerSum
        );
    }

    #[test]
    fn random_solutions_satisfy_equation() {
        use rand::{Rng, SeedableRng};
        let tol = Tolerance::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut solved = 0;
        for _ in 0..40 {
            let n = 2 * (1 + rng.random_range(0..3usize));
            let a = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
                - RealMatrix::identity(n, n).scale(1.5);
            let g = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let rhs = (&g + g.transpose()).scale(0.5);
            match kron_sum_solve(&a, &rhs, tol) {
                Ok(z) => {
                    let resid = (&a * &z + &z * a.transpose() - &rhs).norm();
                    assert!(resid <= 1e-8 * rhs.norm().max(1.0), "residual {resid}");
                    assert!((&z - z.transpose()).norm() < 1e-12);
                    solved += 1;
                }
                Err(LinalgError::SingularKroneckerSum) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(solved >= 35, "shifted drifts should almost always be regular");
    }

    #[test]
    fn general_sylvester() {
        let tol = Tolerance::default();
        let a = RealMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let b = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 2.0]);
        let c = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let z = sylvester_solve(&a, &b, &c, tol).unwrap();
        assert!((&a * &z + &z * &b - &c).norm() < 1e-10);
    }
}
