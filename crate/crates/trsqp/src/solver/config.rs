//! Solver configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step acceptance mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Mode {
    /// Noise-relaxed ratio test: numerator and denominator are both shifted
    /// by `xi (eps_f + nu eps_c)` with `xi = 2 / (1 - pi0)`.
    #[default]
    Relaxed,
    /// Plain `ared / pred` ratio (the relaxation terms forced to zero).
    Classic,
}

/// All algorithmic constants. `Default` gives the standard composite-step
/// settings; everything is overridable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Acceptance threshold on the ratio test, in (0,1).
    pub pi0: f64,
    /// Penalty sufficiency constant, in (0,1).
    pub pi1: f64,
    /// Normal-step contraction: the feasibility step is confined to
    /// `||v|| <= zeta * delta`. In (0,1).
    pub zeta: f64,
    /// Expansion factor for both the trust region and the penalty
    /// parameter, > 1.
    pub tau: f64,
    /// Initial trust-region radius.
    pub delta0: f64,
    /// Initial penalty parameter.
    pub nu_init: f64,
    /// Noise level in the objective supplied to the ratio relaxation.
    pub eps_f: f64,
    /// Noise level in the constraints supplied to the ratio relaxation.
    pub eps_c: f64,
    pub mode: Mode,
    pub max_iter: usize,
    /// Radius below which the run stops with `TrCollapse`.
    pub delta_min: f64,
    /// Radius growth cap.
    pub delta_max: f64,
    /// Termination threshold on the noisy feasibility stationarity
    /// measure `||A'c||`.
    pub tol_feas: f64,
    /// Termination threshold on the noisy reduced gradient `||Z'g||`.
    pub tol_opt: f64,
    /// Penalty safety cap; exceeding it aborts with `PenaltyOverflow`.
    pub nu_max: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Relative residual tolerance for the tangential CG iteration.
    pub cg_tol: f64,
    /// When true, the merit difference re-samples noisy f and c at the
    /// incumbent each test (four noisy calls); the default reuses the
    /// incumbent's cached values, evaluating once per point.
    pub merit_resample_at_x: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pi0: 0.25,
            pi1: 0.3,
            zeta: 0.8,
            tau: 2.0,
            delta0: 1.0,
            nu_init: 1.0,
            eps_f: 0.0,
            eps_c: 0.0,
            mode: Mode::Relaxed,
            max_iter: 500,
            delta_min: 1e-14,
            delta_max: 1e10,
            tol_feas: 1e-8,
            tol_opt: 1e-8,
            nu_max: 1e12,
            rank_tol: 1e-10,
            cg_tol: 1e-8,
            merit_resample_at_x: false,
        }
    }
}

impl SolverConfig {
    /// Relaxation coefficient `xi = 2 / (1 - pi0)`; always exceeds 2 for
    /// `pi0` in (0,1).
    pub fn xi(&self) -> f64 {
        2.0 / (1.0 - self.pi0)
    }

    // Negated comparisons here are deliberate: they reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.pi0) {
            return Err(Error::InvalidConfig(format!("pi0 must be in (0,1), got {}", self.pi0)));
        }
        if !in_unit(self.pi1) {
            return Err(Error::InvalidConfig(format!("pi1 must be in (0,1), got {}", self.pi1)));
        }
        if !in_unit(self.zeta) {
            return Err(Error::InvalidConfig(format!("zeta must be in (0,1), got {}", self.zeta)));
        }
        if !(self.tau.is_finite() && self.tau > 1.0) {
            return Err(Error::InvalidConfig(format!("tau must exceed 1, got {}", self.tau)));
        }
        if !(self.delta0.is_finite() && self.delta0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delta0 must be positive, got {}",
                self.delta0
            )));
        }
        if !(self.nu_init.is_finite() && self.nu_init > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "nu_init must be positive, got {}",
                self.nu_init
            )));
        }
        for (name, v) in [("eps_f", self.eps_f), ("eps_c", self.eps_c)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".to_string()));
        }
        if !(self.delta_min >= 0.0 && self.delta_min < self.delta0) {
            return Err(Error::InvalidConfig(format!(
                "delta_min must lie in [0, delta0), got {}",
                self.delta_min
            )));
        }
        if !(self.delta_max >= self.delta0) {
            return Err(Error::InvalidConfig(format!(
                "delta_max must be at least delta0, got {}",
                self.delta_max
            )));
        }
        for (name, v) in [("tol_feas", self.tol_feas), ("tol_opt", self.tol_opt)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.nu_max > self.nu_init) {
            return Err(Error::InvalidConfig(format!(
                "nu_max must exceed nu_init, got {}",
                self.nu_max
            )));
        }
        if !(self.rank_tol.is_finite() && self.rank_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rank_tol must be non-negative, got {}",
                self.rank_tol
            )));
        }
        if !(self.cg_tol.is_finite() && self.cg_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cg_tol must be non-negative, got {}",
                self.cg_tol
            )));
        }
        Ok(())
    }
}
