//! Equality-constrained NLP definitions and the built-in problem registry.
//!
//! A problem is
//!
//! ```text
//! min f(x)   subject to   c(x) = 0,
//! ```
//!
//! with `f: R^n -> R` and `c: R^n -> R^m`, `m <= n`. Evaluators for the
//! gradient, the constraint Jacobian, and the Hessian of the Lagrangian
//! `L(x, lambda) = f(x) - lambda' c(x)` are supplied explicitly; there is no
//! automatic differentiation.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::rng::{splitmix64, uniform_symmetric, ChaCha8Rng};

type ScalarFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type MatrixFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
type HessianFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// An equality-constrained nonlinear program with exact evaluators.
///
/// Evaluators are pure functions and may be called concurrently. The
/// Lagrangian Hessian evaluator must return a symmetric matrix.
#[derive(Clone)]
pub struct NlpProblem {
    name: String,
    n: usize,
    m: usize,
    x0: DVector<f64>,
    f: ScalarFn,
    c: VectorFn,
    g: VectorFn,
    a: MatrixFn,
    w: HessianFn,
}

impl fmt::Debug for NlpProblem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("NlpProblem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl NlpProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        n: usize,
        m: usize,
        x0: DVector<f64>,
        f: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        c: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        g: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        a: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        w: impl Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        assert!(n > 0, "problem must have at least one variable");
        assert!(m <= n, "more constraints than variables");
        assert_eq!(x0.len(), n, "starting point has wrong length");
        NlpProblem {
            name: name.into(),
            n,
            m,
            x0,
            f: Arc::new(f),
            c: Arc::new(c),
            g: Arc::new(g),
            a: Arc::new(a),
            w: Arc::new(w),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of equality constraints.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Standard starting point.
    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn f(&self, x: &DVector<f64>) -> f64 {
        self.check_x(x);
        (self.f)(x)
    }

    pub fn c(&self, x: &DVector<f64>) -> DVector<f64> {
        self.check_x(x);
        let c = (self.c)(x);
        assert_eq!(c.len(), self.m, "constraint evaluator returned wrong length");
        c
    }

    /// Gradient of the objective.
    pub fn g(&self, x: &DVector<f64>) -> DVector<f64> {
        self.check_x(x);
        let g = (self.g)(x);
        assert_eq!(g.len(), self.n, "gradient evaluator returned wrong length");
        g
    }

    /// Constraint Jacobian, `m x n`, row i holding the gradient of c_i.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.check_x(x);
        let a = (self.a)(x);
        assert_eq!(
            (a.nrows(), a.ncols()),
            (self.m, self.n),
            "Jacobian evaluator returned wrong shape"
        );
        a
    }

    /// Hessian of the Lagrangian `f(x) - lambda' c(x)` with respect to x.
    pub fn lagrangian_hessian(&self, x: &DVector<f64>, lambda: &DVector<f64>) -> DMatrix<f64> {
        self.check_x(x);
        assert_eq!(lambda.len(), self.m, "multiplier vector has wrong length");
        let w = (self.w)(x, lambda);
        assert_eq!(
            (w.nrows(), w.ncols()),
            (self.n, self.n),
            "Hessian evaluator returned wrong shape"
        );
        w
    }

    fn check_x(&self, x: &DVector<f64>) {
        assert_eq!(x.len(), self.n, "point has wrong length for {}", self.name);
    }
}

fn hs7() -> NlpProblem {
    NlpProblem::new(
        "HS7",
        2,
        1,
        DVector::from_vec(vec![2.0, 2.0]),
        |x| (1.0 + x[0] * x[0]).ln() - x[1],
        |x| {
            let t = 1.0 + x[0] * x[0];
            DVector::from_vec(vec![t * t + x[1] * x[1] - 4.0])
        },
        |x| {
            let t = 1.0 + x[0] * x[0];
            DVector::from_vec(vec![2.0 * x[0] / t, -1.0])
        },
        |x| {
            let t = 1.0 + x[0] * x[0];
            DMatrix::from_row_slice(1, 2, &[4.0 * x[0] * t, 2.0 * x[1]])
        },
        |x, l| {
            let t = 1.0 + x[0] * x[0];
            let mut w = DMatrix::zeros(2, 2);
            w[(0, 0)] = 2.0 * (1.0 - x[0] * x[0]) / (t * t) - l[0] * (4.0 + 12.0 * x[0] * x[0]);
            w[(1, 1)] = -l[0] * 2.0;
            w
        },
    )
}

fn byrdsphr() -> NlpProblem {
    NlpProblem::new(
        "BYRDSPHR",
        3,
        2,
        DVector::from_vec(vec![5.0, 0.0001, -0.0001]),
        |x| -x[0] - x[1] - x[2],
        |x| {
            let ss = x[1] * x[1] + x[2] * x[2];
            DVector::from_vec(vec![
                x[0] * x[0] + ss - 10.0,
                (x[0] - 1.0) * (x[0] - 1.0) + ss - 10.0,
            ])
        },
        |_| DVector::from_vec(vec![-1.0, -1.0, -1.0]),
        |x| {
            DMatrix::from_row_slice(
                2,
                3,
                &[
                    2.0 * x[0],
                    2.0 * x[1],
                    2.0 * x[2],
                    2.0 * (x[0] - 1.0),
                    2.0 * x[1],
                    2.0 * x[2],
                ],
            )
        },
        |_, l| DMatrix::from_diagonal_element(3, 3, -2.0 * (l[0] + l[1])),
    )
}

fn hs6() -> NlpProblem {
    NlpProblem::new(
        "HS6",
        2,
        1,
        DVector::from_vec(vec![-1.2, 1.0]),
        |x| (1.0 - x[0]) * (1.0 - x[0]),
        |x| DVector::from_vec(vec![10.0 * (x[1] - x[0] * x[0])]),
        |x| DVector::from_vec(vec![-2.0 * (1.0 - x[0]), 0.0]),
        |x| DMatrix::from_row_slice(1, 2, &[-20.0 * x[0], 10.0]),
        |_, l| {
            let mut w = DMatrix::zeros(2, 2);
            w[(0, 0)] = 2.0 + 20.0 * l[0];
            w
        },
    )
}

fn hs27() -> NlpProblem {
    NlpProblem::new(
        "HS27",
        3,
        1,
        DVector::from_vec(vec![2.0, 2.0, 2.0]),
        |x| {
            let d = x[1] - x[0] * x[0];
            0.01 * (x[0] - 1.0) * (x[0] - 1.0) + d * d
        },
        |x| DVector::from_vec(vec![x[0] + x[2] * x[2] + 1.0]),
        |x| {
            let d = x[1] - x[0] * x[0];
            DVector::from_vec(vec![0.02 * (x[0] - 1.0) - 4.0 * x[0] * d, 2.0 * d, 0.0])
        },
        |x| DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 2.0 * x[2]]),
        |x, l| {
            let mut w = DMatrix::zeros(3, 3);
            w[(0, 0)] = 0.02 - 4.0 * x[1] + 12.0 * x[0] * x[0];
            w[(0, 1)] = -4.0 * x[0];
            w[(1, 0)] = -4.0 * x[0];
            w[(1, 1)] = 2.0;
            w[(2, 2)] = -l[0] * 2.0;
            w
        },
    )
}

fn hs39() -> NlpProblem {
    NlpProblem::new(
        "HS39",
        4,
        2,
        DVector::from_vec(vec![2.0, 2.0, 2.0, 2.0]),
        |x| -x[0],
        |x| {
            DVector::from_vec(vec![
                x[1] - x[0] * x[0] * x[0] - x[2] * x[2],
                x[0] * x[0] - x[1] - x[3] * x[3],
            ])
        },
        |_| DVector::from_vec(vec![-1.0, 0.0, 0.0, 0.0]),
        |x| {
            DMatrix::from_row_slice(
                2,
                4,
                &[
                    -3.0 * x[0] * x[0],
                    1.0,
                    -2.0 * x[2],
                    0.0,
                    2.0 * x[0],
                    -1.0,
                    0.0,
                    -2.0 * x[3],
                ],
            )
        },
        |x, l| {
            let mut w = DMatrix::zeros(4, 4);
            w[(0, 0)] = -l[0] * (-6.0 * x[0]) - l[1] * 2.0;
            w[(2, 2)] = -l[0] * (-2.0);
            w[(3, 3)] = -l[1] * (-2.0);
            w
        },
    )
}

/// Sphere constraint duplicated into two identical rows, so the Jacobian is
/// rank deficient at every point (and rank zero at the origin). Exercises the
/// solver's tolerance of rank-deficient constraint systems.
fn rank_deficient_toy() -> NlpProblem {
    let sphere = |x: &DVector<f64>| x.norm_squared() - 1.0;
    NlpProblem::new(
        "RANK_DEFICIENT_TOY",
        3,
        2,
        DVector::from_vec(vec![2.0, 1.0, 0.5]),
        |x| x[0] + x[1] + x[2],
        move |x| {
            let s = sphere(x);
            DVector::from_vec(vec![s, s])
        },
        |_| DVector::from_vec(vec![1.0, 1.0, 1.0]),
        |x| {
            let row: Vec<f64> = x.iter().map(|xi| 2.0 * xi).collect();
            let mut a = DMatrix::zeros(2, 3);
            for j in 0..3 {
                a[(0, j)] = row[j];
                a[(1, j)] = row[j];
            }
            a
        },
        |_, l| DMatrix::from_diagonal_element(3, 3, -2.0 * (l[0] + l[1])),
    )
}

/// Random convex quadratic objective with linear equality constraints.
///
/// `f(x) = x' Q x / 2 + b' x` with `Q = R'R + I` for a seeded matrix `R`
/// with entries uniform in `[-1, 1)`, and `c(x) = C x - d` with `d` chosen so
/// the constraints are consistent. The KKT system is linear, so the exact
/// solution is available in closed form via [`quad_lin_kkt`].
pub fn quad_lin(n: usize, m: usize, seed: u64) -> NlpProblem {
    assert!(n > 0 && m <= n, "quad_lin requires 0 < m <= n");
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x51AD_11E5));
    let r = DMatrix::from_fn(n, n, |_, _| uniform_symmetric(&mut rng));
    let q = r.transpose() * &r + DMatrix::identity(n, n);
    let b = DVector::from_fn(n, |_, _| uniform_symmetric(&mut rng));
    let cmat = DMatrix::from_fn(m, n, |_, _| uniform_symmetric(&mut rng));
    let xf = DVector::from_fn(n, |_, _| uniform_symmetric(&mut rng));
    let d = &cmat * &xf;

    let q_f = q.clone();
    let q_g = q.clone();
    let q_w = q.clone();
    let b_f = b.clone();
    let c_c = cmat.clone();
    let c_a = cmat.clone();
    let d_c = d.clone();

    NlpProblem::new(
        format!("QUAD_LIN({n},{m},{seed})"),
        n,
        m,
        DVector::zeros(n),
        move |x| 0.5 * x.dot(&(&q_f * x)) + b_f.dot(x),
        move |x| &c_c * x - &d_c,
        move |x| &q_g * x + &b,
        move |_| c_a.clone(),
        move |_, _| q_w.clone(),
    )
}

/// Closed-form KKT solution of [`quad_lin`] with the same parameters:
/// `(x_star, lambda_star, f_star)` solving `Qx + b - C' lambda = 0`,
/// `Cx = d` by a dense linear solve.
pub fn quad_lin_kkt(n: usize, m: usize, seed: u64) -> (DVector<f64>, DVector<f64>, f64) {
    let p = quad_lin(n, m, seed);
    let x_any = DVector::zeros(n);
    let q = p.lagrangian_hessian(&x_any, &DVector::zeros(m));
    let b = p.g(&x_any);
    let cmat = p.jacobian(&x_any);
    let d = -p.c(&x_any);

    let dim = n + m;
    let mut kkt = DMatrix::zeros(dim, dim);
    kkt.view_mut((0, 0), (n, n)).copy_from(&q);
    kkt.view_mut((0, n), (n, m)).copy_from(&(-cmat.transpose()));
    kkt.view_mut((n, 0), (m, n)).copy_from(&cmat);
    let mut rhs = DVector::zeros(dim);
    rhs.rows_mut(0, n).copy_from(&(-&b));
    rhs.rows_mut(n, m).copy_from(&d);

    let sol = kkt
        .lu()
        .solve(&rhs)
        .expect("quad_lin KKT system is nonsingular by construction");
    let x_star = DVector::from(sol.rows(0, n).clone_owned());
    let l_star = DVector::from(sol.rows(n, m).clone_owned());
    let f_star = p.f(&x_star);
    (x_star, l_star, f_star)
}

/// Look up a built-in problem by name.
///
/// Recognized names: `HS7`, `BYRDSPHR`, `HS6`, `HS27`, `HS39`,
/// `RANK_DEFICIENT_TOY`, `QUAD_LIN(k)` (k linear constraints on k+2
/// variables, seed 0), and `QUAD_LIN(n,m,seed)`. Matching is
/// case-insensitive.
pub fn builtin_problem(name: &str) -> Result<NlpProblem> {
    let canon = name.trim().to_ascii_uppercase();
    match canon.as_str() {
        "HS7" => Ok(hs7()),
        "BYRDSPHR" => Ok(byrdsphr()),
        "HS6" => Ok(hs6()),
        "HS27" => Ok(hs27()),
        "HS39" => Ok(hs39()),
        "RANK_DEFICIENT_TOY" => Ok(rank_deficient_toy()),
        _ => {
            if let Some(params) = parse_quad_lin(&canon) {
                let (n, m, seed) = params;
                if m == 0 || m > n {
                    return Err(Error::InvalidConfig(format!(
                        "QUAD_LIN requires 0 < m <= n, got n={n}, m={m}"
                    )));
                }
                Ok(quad_lin(n, m, seed))
            } else {
                Err(Error::UnknownProblem(name.to_string()))
            }
        }
    }
}

/// Known optimal objective value for built-ins where one is available.
///
/// Values come from analytic elimination of the KKT conditions (HS7, HS6,
/// HS27, HS39, BYRDSPHR, RANK_DEFICIENT_TOY) or from the closed-form KKT
/// solve (QUAD_LIN).
pub fn known_objective(name: &str) -> Option<f64> {
    let canon = name.trim().to_ascii_uppercase();
    match canon.as_str() {
        "HS7" => Some(-(3.0f64.sqrt())),
        "HS6" => Some(0.0),
        "HS27" => Some(0.04),
        "HS39" => Some(-1.0),
        // At feasible points x1 = 1/2, and x2 = x3 = sqrt(9.75/2) maximizes
        // x2 + x3 on the circle x2^2 + x3^2 = 9.75.
        "BYRDSPHR" => Some(-0.5 - 19.5f64.sqrt()),
        // Linear objective on the unit sphere.
        "RANK_DEFICIENT_TOY" => Some(-(3.0f64.sqrt())),
        _ => parse_quad_lin(&canon).map(|(n, m, seed)| quad_lin_kkt(n, m, seed).2),
    }
}

fn parse_quad_lin(canon: &str) -> Option<(usize, usize, u64)> {
    let inner = canon.strip_prefix("QUAD_LIN(")?.strip_suffix(')')?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [k] => {
            let k: usize = k.parse().ok()?;
            Some((k + 2, k, 0))
        }
        [n, m, seed] => {
            let n: usize = n.parse().ok()?;
            let m: usize = m.parse().ok()?;
            let seed: u64 = seed.parse().ok()?;
            Some((n, m, seed))
        }
        _ => None,
    }
}

/// Names of the fixed built-in problems (excludes the parametric QUAD_LIN
/// family).
pub const BUILTIN_NAMES: [&str; 6] = ["HS7", "BYRDSPHR", "HS6", "HS27", "HS39", "RANK_DEFICIENT_TOY"];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hs7_values_at_x0() {
        let p = builtin_problem("HS7").unwrap();
        let x0 = p.x0().clone();
        // f(2,2) = ln(5) - 2, computed independently.
        assert_relative_eq!(p.f(&x0), 5.0f64.ln() - 2.0, max_relative = 1e-15);
        // c(2,2) = 25 + 4 - 4 = 25.
        assert_relative_eq!(p.c(&x0)[0], 25.0, max_relative = 1e-15);
    }

    #[test]
    fn hs7_analytic_kkt_point() {
        // Stationarity forces x1 = 0, feasibility x2 = sqrt(3),
        // lambda = -1/(2 sqrt(3)).
        let p = builtin_problem("HS7").unwrap();
        let xs = DVector::from_vec(vec![0.0, 3.0f64.sqrt()]);
        let ls = DVector::from_vec(vec![-1.0 / (2.0 * 3.0f64.sqrt())]);
        assert!(p.c(&xs).norm() < 1e-14);
        let resid = p.g(&xs) - p.jacobian(&xs).transpose() * &ls;
        assert!(resid.norm() < 1e-14);
        assert_relative_eq!(p.f(&xs), -(3.0f64.sqrt()), max_relative = 1e-15);
    }

    #[test]
    fn byrdsphr_feasible_points_have_half_x1() {
        // c1 - c2 = 2 x1 - 1, so feasibility forces x1 = 1/2.
        let p = builtin_problem("BYRDSPHR").unwrap();
        for t in [0.3, 1.0, 2.0] {
            let x = DVector::from_vec(vec![t, 0.7, -0.2]);
            let c = p.c(&x);
            assert_relative_eq!(c[0] - c[1], 2.0 * t - 1.0, max_relative = 1e-14);
        }
        let s = (9.75f64 / 2.0).sqrt();
        let xs = DVector::from_vec(vec![0.5, s, s]);
        assert!(p.c(&xs).norm() < 1e-12);
        assert_relative_eq!(p.f(&xs), -0.5 - 19.5f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn quad_lin_kkt_is_stationary_and_feasible() {
        for seed in 0..20 {
            let (xs, ls, _) = quad_lin_kkt(5, 3, seed);
            let p = quad_lin(5, 3, seed);
            assert!(p.c(&xs).norm() < 1e-10, "seed {seed} infeasible");
            let resid = p.g(&xs) - p.jacobian(&xs).transpose() * &ls;
            assert!(resid.norm() < 1e-10, "seed {seed} not stationary");
        }
    }

    #[test]
    fn quad_lin_is_deterministic_per_seed() {
        let a = quad_lin(4, 2, 9);
        let b = quad_lin(4, 2, 9);
        let x = DVector::from_vec(vec![0.3, -0.7, 1.1, 0.05]);
        assert_eq!(a.f(&x).to_bits(), b.f(&x).to_bits());
        assert_eq!(a.c(&x), b.c(&x));
    }

    #[test]
    fn rank_deficient_toy_duplicates_rows() {
        let p = builtin_problem("RANK_DEFICIENT_TOY").unwrap();
        let x = DVector::from_vec(vec![0.4, -1.3, 0.9]);
        let a = p.jacobian(&x);
        assert_eq!(a.row(0), a.row(1));
        let c = p.c(&x);
        assert_eq!(c[0], c[1]);
    }

    #[test]
    fn registry_rejects_unknown_names() {
        assert!(matches!(
            builtin_problem("NOT_A_PROBLEM"),
            Err(Error::UnknownProblem(_))
        ));
        assert!(matches!(
            builtin_problem("QUAD_LIN(3,5,0)"),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn registry_parses_quad_lin_forms() {
        let p = builtin_problem("QUAD_LIN(3)").unwrap();
        assert_eq!((p.n(), p.m()), (5, 3));
        let p = builtin_problem("quad_lin(6,2,17)").unwrap();
        assert_eq!((p.n(), p.m()), (6, 2));
    }

    #[test]
    fn hessians_are_symmetric() {
        for name in BUILTIN_NAMES {
            let p = builtin_problem(name).unwrap();
            let x = p.x0().clone();
            let l = DVector::from_element(p.m(), 0.7);
            let w = p.lagrangian_hessian(&x, &l);
            let asym = (&w - w.transpose()).abs().max();
            assert_eq!(asym, 0.0, "{name} Hessian not symmetric by construction");
        }
    }
}
