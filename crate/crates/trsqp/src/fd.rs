//! Central finite-difference verification of hand-coded derivatives.

use nalgebra::DVector;

use crate::problem::NlpProblem;

/// Flag threshold on relative errors.
pub const FLAG_TOL: f64 = 1e-4;

/// One flagged derivative entry.
#[derive(Debug, Clone)]
pub struct DerivativeFlag {
    /// "g", "A", or "W".
    pub block: &'static str,
    pub row: usize,
    pub col: usize,
    pub analytic: f64,
    pub finite_diff: f64,
    pub rel_error: f64,
}

/// Result of comparing analytic derivatives against central differences.
#[derive(Debug, Clone)]
pub struct DerivativeReport {
    pub problem: String,
    pub h: f64,
    pub max_rel_g: f64,
    pub max_rel_a: f64,
    pub max_rel_w: f64,
    pub flags: Vec<DerivativeFlag>,
}

impl DerivativeReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }
}

fn rel_err(fd: f64, an: f64) -> f64 {
    (fd - an).abs() / (1.0 + an.abs())
}

/// Compare g against differences of f, A against differences of c, and W
/// against differences of grad_x L, all centered with step `h`.
///
/// The multiplier used for the Lagrangian block is the fixed vector
/// `lambda_i = 1 + i`, which weights every constraint Hessian with a
/// distinct coefficient.
pub fn check_derivatives(problem: &NlpProblem, x: &DVector<f64>, h: f64) -> DerivativeReport {
    assert!(h > 0.0, "finite-difference step must be positive");
    assert_eq!(x.len(), problem.n(), "point has wrong length");
    let n = problem.n();
    let m = problem.m();
    let lambda = DVector::from_fn(m, |i, _| 1.0 + i as f64);

    let mut flags = Vec::new();
    let mut max_rel_g: f64 = 0.0;
    let mut max_rel_a: f64 = 0.0;
    let mut max_rel_w: f64 = 0.0;

    let g = problem.g(x);
    let a = problem.jacobian(x);
    let w = problem.lagrangian_hessian(x, &lambda);

    let grad_l = |x: &DVector<f64>| -> DVector<f64> {
        problem.g(x) - problem.jacobian(x).transpose() * &lambda
    };

    let mut xp = x.clone();
    let mut xm = x.clone();
    for j in 0..n {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;

        let g_fd = (problem.f(&xp) - problem.f(&xm)) / (2.0 * h);
        let e = rel_err(g_fd, g[j]);
        max_rel_g = max_rel_g.max(e);
        if e > FLAG_TOL {
            flags.push(DerivativeFlag {
                block: "g",
                row: 0,
                col: j,
                analytic: g[j],
                finite_diff: g_fd,
                rel_error: e,
            });
        }

        let c_fd = (problem.c(&xp) - problem.c(&xm)) / (2.0 * h);
        for i in 0..m {
            let e = rel_err(c_fd[i], a[(i, j)]);
            max_rel_a = max_rel_a.max(e);
            if e > FLAG_TOL {
                flags.push(DerivativeFlag {
                    block: "A",
                    row: i,
                    col: j,
                    analytic: a[(i, j)],
                    finite_diff: c_fd[i],
                    rel_error: e,
                });
            }
        }

        let w_fd: DVector<f64> = (grad_l(&xp) - grad_l(&xm)) / (2.0 * h);
        for i in 0..n {
            let e = rel_err(w_fd[i], w[(i, j)]);
            max_rel_w = max_rel_w.max(e);
            if e > FLAG_TOL {
                flags.push(DerivativeFlag {
                    block: "W",
                    row: i,
                    col: j,
                    analytic: w[(i, j)],
                    finite_diff: w_fd[i],
                    rel_error: e,
                });
            }
        }

        xp[j] = x[j];
        xm[j] = x[j];
    }

    DerivativeReport {
        problem: problem.name().to_string(),
        h,
        max_rel_g,
        max_rel_a,
        max_rel_w,
        flags,
    }
}

/// Default step: `1e-6 * (1 + ||x||)`.
pub fn default_step(x: &DVector<f64>) -> f64 {
    1e-6 * (1.0 + x.norm())
}
