//! Least-squares Lagrange multiplier estimates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimum-norm solution of `min_lambda || g - A' lambda ||`.
///
/// Singular values below `rank_tol * sigma_max` are treated as zero, so
/// rank-deficient Jacobians yield the minimum-norm estimate instead of an
/// error. The residual `g - A' lambda` is orthogonal to the numerical range
/// of `A'`.
pub fn least_squares_multipliers(
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    rank_tol: f64,
) -> Result<DVector<f64>> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 {
        return Err(Error::InvalidInput {
            context: "least_squares_multipliers",
            message: "no constraints".to_string(),
        });
    }
    if g.len() != n {
        return Err(Error::Dimension {
            context: "least_squares_multipliers",
            expected: n,
            actual: g.len(),
        });
    }
    if g.iter().any(|v| !v.is_finite()) || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least_squares_multipliers input"));
    }

    let at = a.transpose();
    let svd = at.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = if sigma_max > 0.0 {
        rank_tol * sigma_max
    } else {
        // A = 0: every lambda is a minimizer; pick the minimum-norm one.
        return Ok(DVector::zeros(m));
    };
    let lambda = svd
        .solve(g, eps)
        .map_err(|msg| Error::InvalidInput {
            context: "least_squares_multipliers",
            message: msg.to_string(),
        })?;
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_jacobian_copies_gradient() {
        let a = DMatrix::identity(2, 2);
        let g = DVector::from_vec(vec![3.0, -1.0]);
        let l = least_squares_multipliers(&g, &a, 1e-10).unwrap();
        assert_relative_eq!(l[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(l[1], -1.0, max_relative = 1e-14);
    }

    #[test]
    fn single_row_projects() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let g = DVector::from_vec(vec![2.0, 3.0]);
        let l = least_squares_multipliers(&g, &a, 1e-10).unwrap();
        assert_relative_eq!(l[0], 2.0, max_relative = 1e-14);
        let resid = &g - a.transpose() * &l;
        assert_relative_eq!(resid[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(resid[1], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn normal_equations_oracle() {
        // A = [1 1], g = (1, 3): (A A') lambda = A g gives 2 lambda = 4.
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let g = DVector::from_vec(vec![1.0, 3.0]);
        let l = least_squares_multipliers(&g, &a, 1e-10).unwrap();
        assert_relative_eq!(l[0], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn residual_is_orthogonal_to_row_space() {
        use crate::rng::{uniform_symmetric, ChaCha8Rng};
        use rand_core::SeedableRng;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(2, 4, |_, _| uniform_symmetric(&mut rng));
            let g = DVector::from_fn(4, |_, _| uniform_symmetric(&mut rng));
            let l = least_squares_multipliers(&g, &a, 1e-10).unwrap();
            let resid = &g - a.transpose() * &l;
            let ortho = (&a * &resid).amax();
            assert!(ortho <= 1e-8 * (1.0 + g.norm()), "seed {seed}: {ortho}");
        }
    }

    #[test]
    fn rank_deficient_rows_get_min_norm_solution() {
        // Duplicated rows: lambda splits evenly between them.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let g = DVector::from_vec(vec![4.0, 1.0]);
        let l = least_squares_multipliers(&g, &a, 1e-10).unwrap();
        assert_relative_eq!(l[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(l[1], 2.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_jacobian_gives_zero_multipliers() {
        let a = DMatrix::zeros(2, 3);
        let g = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let l = least_squares_multipliers(&g, &a, 1e-10).unwrap();
        assert_eq!(l, DVector::zeros(2));
    }
}
