//! Bounded noise injection around an [`NlpProblem`].
//!
//! The oracle perturbs every evaluation elementwise with fresh draws: noise
//! is a function of the call, not of the point, so two evaluations at the
//! same `x` generally differ. With all levels zero the oracle is
//! bit-transparent (no draws are consumed, no additions performed).

use nalgebra::{DMatrix, DVector};
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::NlpProblem;
use crate::rng::{standard_normal, uniform_symmetric, ChaCha8Rng};

/// Shape of the elementwise perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum NoiseDistribution {
    /// I.i.d. uniform on `[-eps, eps]`.
    #[default]
    Uniform,
    /// I.i.d. `N(0, eps^2)` truncated at `±4 eps`, so the bounded-noise
    /// model still holds literally.
    Gaussian,
}

/// Elementwise noise bounds per evaluation channel, plus the generator seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub eps_f: f64,
    pub eps_c: f64,
    pub eps_g: f64,
    pub eps_a: f64,
    pub eps_w: f64,
    pub distribution: NoiseDistribution,
    pub seed: u64,
}

impl NoiseSpec {
    /// No noise on any channel.
    pub fn zero(seed: u64) -> Self {
        NoiseSpec {
            eps_f: 0.0,
            eps_c: 0.0,
            eps_g: 0.0,
            eps_a: 0.0,
            eps_w: 0.0,
            distribution: NoiseDistribution::Uniform,
            seed,
        }
    }

    /// Uniform noise at the same level on f, c, g, and A. The Hessian
    /// channel stays clean; set `eps_w` explicitly to perturb it.
    pub fn uniform(eps: f64, seed: u64) -> Self {
        NoiseSpec {
            eps_f: eps,
            eps_c: eps,
            eps_g: eps,
            eps_a: eps,
            eps_w: 0.0,
            distribution: NoiseDistribution::Uniform,
            seed,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.eps_f == 0.0
            && self.eps_c == 0.0
            && self.eps_g == 0.0
            && self.eps_a == 0.0
            && self.eps_w == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eps) in [
            ("eps_f", self.eps_f),
            ("eps_c", self.eps_c),
            ("eps_g", self.eps_g),
            ("eps_a", self.eps_a),
            ("eps_w", self.eps_w),
        ] {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "noise level {name} must be finite and non-negative, got {eps}"
                )));
            }
        }
        Ok(())
    }
}

/// The evaluation surface the solver sees. Implementations may be noisy;
/// the solver must work from these values alone.
pub trait Oracle {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn x0(&self) -> DVector<f64>;
    fn eval_f(&mut self, x: &DVector<f64>) -> Result<f64>;
    fn eval_c(&mut self, x: &DVector<f64>) -> Result<DVector<f64>>;
    fn eval_g(&mut self, x: &DVector<f64>) -> Result<DVector<f64>>;
    fn eval_jacobian(&mut self, x: &DVector<f64>) -> Result<DMatrix<f64>>;
    fn eval_lagrangian_hessian(
        &mut self,
        x: &DVector<f64>,
        lambda: &DVector<f64>,
    ) -> Result<DMatrix<f64>>;
}

/// Wraps a problem with seeded bounded noise on every evaluation channel.
///
/// One oracle drives one solver run; the generator state advances with each
/// call, so runs sharing a seed and call sequence reproduce bit-identical
/// streams. The wrapped problem stays reachable through [`Self::problem`]
/// for harness-side diagnostics; solver code receives the oracle only
/// through the [`Oracle`] trait and cannot reach the exact evaluators.
#[derive(Debug, Clone)]
pub struct NoisyOracle {
    problem: NlpProblem,
    noise: NoiseSpec,
    rng: ChaCha8Rng,
}

impl NoisyOracle {
    pub fn new(problem: NlpProblem, noise: NoiseSpec) -> Result<Self> {
        noise.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(noise.seed);
        Ok(NoisyOracle {
            problem,
            noise,
            rng,
        })
    }

    /// The wrapped exact problem. Diagnostics only; stepping logic must not
    /// look at this.
    pub fn problem(&self) -> &NlpProblem {
        &self.problem
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    fn draw(&mut self, eps: f64) -> f64 {
        match self.noise.distribution {
            NoiseDistribution::Uniform => eps * uniform_symmetric(&mut self.rng),
            NoiseDistribution::Gaussian => loop {
                let z = standard_normal(&mut self.rng);
                if z.abs() <= 4.0 {
                    return eps * z;
                }
            },
        }
    }

    fn check_x(&self, x: &DVector<f64>, context: &'static str) -> Result<()> {
        if x.len() != self.problem.n() {
            return Err(Error::Dimension {
                context,
                expected: self.problem.n(),
                actual: x.len(),
            });
        }
        Ok(())
    }
}

impl Oracle for NoisyOracle {
    fn n(&self) -> usize {
        self.problem.n()
    }

    fn m(&self) -> usize {
        self.problem.m()
    }

    fn x0(&self) -> DVector<f64> {
        self.problem.x0().clone()
    }

    fn eval_f(&mut self, x: &DVector<f64>) -> Result<f64> {
        self.check_x(x, "eval_f")?;
        let f = self.problem.f(x);
        if self.noise.eps_f == 0.0 {
            return Ok(f);
        }
        let delta = self.draw(self.noise.eps_f);
        debug_assert!(delta.abs() <= 4.0 * self.noise.eps_f);
        Ok(f + delta)
    }

    fn eval_c(&mut self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_x(x, "eval_c")?;
        let mut c = self.problem.c(x);
        if self.noise.eps_c != 0.0 {
            let eps = self.noise.eps_c;
            for ci in c.iter_mut() {
                *ci += self.draw(eps);
            }
        }
        Ok(c)
    }

    fn eval_g(&mut self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_x(x, "eval_g")?;
        let mut g = self.problem.g(x);
        if self.noise.eps_g != 0.0 {
            let eps = self.noise.eps_g;
            for gi in g.iter_mut() {
                *gi += self.draw(eps);
            }
        }
        Ok(g)
    }

    fn eval_jacobian(&mut self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_x(x, "eval_jacobian")?;
        let mut a = self.problem.jacobian(x);
        if self.noise.eps_a != 0.0 {
            let eps = self.noise.eps_a;
            for aij in a.iter_mut() {
                *aij += self.draw(eps);
            }
        }
        Ok(a)
    }

    fn eval_lagrangian_hessian(
        &mut self,
        x: &DVector<f64>,
        lambda: &DVector<f64>,
    ) -> Result<DMatrix<f64>> {
        self.check_x(x, "eval_lagrangian_hessian")?;
        if lambda.len() != self.problem.m() {
            return Err(Error::Dimension {
                context: "eval_lagrangian_hessian",
                expected: self.problem.m(),
                actual: lambda.len(),
            });
        }
        let mut w = self.problem.lagrangian_hessian(x, lambda);
        if self.noise.eps_w != 0.0 {
            // Symmetrized perturbation (D + D')/2 keeps the Hessian
            // symmetric while each entry stays within eps_w.
            let n = w.nrows();
            let eps = self.noise.eps_w;
            let d = DMatrix::from_fn(n, n, |_, _| self.draw(eps));
            let sym = (&d + d.transpose()) * 0.5;
            w += sym;
        }
        Ok(w)
    }
}
