//! Orthonormal null-space bases of constraint Jacobians.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Orthonormal basis `Z` (n x (n - r)) for the null space of an `m x n`
/// Jacobian of numerical rank `r`.
///
/// The basis is a deterministic function of the matrix entries: the
/// Householder QR of `A'` is taken in natural column order (no pivoting),
/// and the rank-deficient fallback orthogonalizes against the leading right
/// singular vectors, which are themselves deterministic. Nearby Jacobians
/// therefore produce nearby bases.
#[derive(Debug, Clone)]
pub struct NullSpaceBasis {
    pub z: DMatrix<f64>,
    /// Numerical rank of A.
    pub rank: usize,
    /// Relative singular-value cutoff used for the rank decision.
    pub rank_tol: f64,
}

impl NullSpaceBasis {
    /// Width of the basis, `n - rank`.
    pub fn width(&self) -> usize {
        self.z.ncols()
    }
}

/// Compute an orthonormal null-space basis for `a` with singular values
/// below `rank_tol * sigma_max` treated as zero.
///
/// Full-rank Jacobians take the QR route on `A'`; otherwise the basis is the
/// orthogonal complement of the numerically significant right singular
/// vectors. An `n = 0` input is rejected; a square full-rank `A` yields a
/// width-zero basis, which is valid.
pub fn null_space_basis(a: &DMatrix<f64>, rank_tol: f64) -> Result<NullSpaceBasis> {
    let (m, n) = (a.nrows(), a.ncols());
    if n == 0 {
        return Err(Error::InvalidInput {
            context: "null_space_basis",
            message: "matrix has zero columns".to_string(),
        });
    }
    if m > n {
        return Err(Error::InvalidInput {
            context: "null_space_basis",
            message: format!("more rows than columns ({m} > {n})"),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("null_space_basis input"));
    }
    if !(rank_tol.is_finite() && rank_tol >= 0.0) {
        return Err(Error::InvalidInput {
            context: "null_space_basis",
            message: format!("rank_tol must be finite and non-negative, got {rank_tol}"),
        });
    }

    if m == 0 {
        return Ok(NullSpaceBasis {
            z: DMatrix::identity(n, n),
            rank: 0,
            rank_tol,
        });
    }

    let svd = a.clone().svd(false, false);
    let sigma_max = svd.singular_values.max();
    let cutoff = rank_tol * sigma_max;
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > cutoff && s > 0.0)
        .count();

    let range_basis = if rank == m {
        // Full rank: the rows of A themselves span the row space.
        a.transpose()
    } else {
        // Rank deficient: keep only the significant right singular vectors.
        let svd = a.clone().svd(false, true);
        let v_t = svd.v_t.expect("svd computed with v_t");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        // nalgebra returns singular values unsorted in general; fix an order.
        order.sort_by(|&i, &j| {
            svd.singular_values[j]
                .partial_cmp(&svd.singular_values[i])
                .unwrap()
        });
        let mut basis = DMatrix::zeros(n, rank);
        for (col, &idx) in order.iter().take(rank).enumerate() {
            basis.set_column(col, &v_t.row(idx).transpose());
        }
        basis
    };

    let q = full_householder_q(&range_basis);
    let width = n - rank;
    let z = q.columns(rank, width).into_owned();
    Ok(NullSpaceBasis { z, rank, rank_tol })
}

/// Full `n x n` orthogonal factor of the Householder QR of an `n x k`
/// matrix (`k <= n`), natural column order, standard sign convention.
fn full_householder_q(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = (a.nrows(), a.ncols());
    debug_assert!(k <= n);
    let mut r = a.clone();
    // Reflectors v_j (unit-scaled so v[0] = 1) and coefficients beta_j.
    let mut vs: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut betas: Vec<f64> = Vec::with_capacity(k);

    for j in 0..k {
        let len = n - j;
        let mut v = DVector::zeros(len);
        for i in 0..len {
            v[i] = r[(j + i, j)];
        }
        let sigma = v.norm();
        if sigma == 0.0 {
            vs.push(v);
            betas.push(0.0);
            continue;
        }
        let alpha = if v[0] >= 0.0 { -sigma } else { sigma };
        v[0] -= alpha;
        let vnorm2 = v.norm_squared();
        let beta = if vnorm2 == 0.0 { 0.0 } else { 2.0 / vnorm2 };
        // Apply H = I - beta v v' to the trailing block of R.
        for col in j..k {
            let mut dot = 0.0;
            for i in 0..len {
                dot += v[i] * r[(j + i, col)];
            }
            let s = beta * dot;
            for i in 0..len {
                r[(j + i, col)] -= s * v[i];
            }
        }
        vs.push(v);
        betas.push(beta);
    }

    // Accumulate Q = H_0 H_1 ... H_{k-1} by applying reflectors to I in
    // reverse order.
    let mut q = DMatrix::identity(n, n);
    for j in (0..k).rev() {
        let v = &vs[j];
        let beta = betas[j];
        if beta == 0.0 {
            continue;
        }
        let len = n - j;
        for col in 0..n {
            let mut dot = 0.0;
            for i in 0..len {
                dot += v[i] * q[(j + i, col)];
            }
            let s = beta * dot;
            for i in 0..len {
                q[(j + i, col)] -= s * v[i];
            }
        }
    }
    q
}
