//! Affine map from raw Gaussian rewards to Bernoulli success probabilities.
//!
//! Boundaries are placed so a reward falls inside `[L, U]` with probability
//! at least `1 − 2ε_b` under the model:
//!
//! ```text
//! L = mu_min − σ·Q⁻¹(ε_b)      U = mu_max + σ·Q⁻¹(ε_b)
//! ```
//!
//! The mapped value is `(r − L)/(U − L)` clamped to `[0,1]`; clamping
//! resolves the 2ε_b tail mass the bounds leave outside.

use serde::{Deserialize, Serialize};

use super::PolicyError;
use crate::theory::q_inverse;

/// Reward-to-[0,1] mapper shared by the Thompson-sampling policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardMapper {
    pub mu_min: f64,
    pub mu_max: f64,
    pub sigma: f64,
    pub epsilon_b: f64,
    /// Lower boundary L.
    pub lower: f64,
    /// Upper boundary U.
    pub upper: f64,
}

impl RewardMapper {
    pub fn new(mu_min: f64, mu_max: f64, sigma: f64, epsilon_b: f64) -> Result<Self, PolicyError> {
        if !(mu_min < mu_max) {
            return Err(PolicyError::InvalidConfig(format!(
                "mapper needs mu_min < mu_max, got [{mu_min}, {mu_max}]"
            )));
        }
        if !(sigma > 0.0) {
            return Err(PolicyError::InvalidConfig(format!("mapper sigma must be > 0, got {sigma}")));
        }
        if !(epsilon_b > 0.0 && epsilon_b < 0.5) {
            return Err(PolicyError::InvalidConfig(format!(
                "epsilon_b must be in (0, 0.5), got {epsilon_b}"
            )));
        }
        let quantile = q_inverse(epsilon_b)
            .map_err(|e| PolicyError::InvalidConfig(format!("epsilon_b quantile: {e}")))?;
        let lower = mu_min - sigma * quantile;
        let upper = mu_max + sigma * quantile;
        Ok(Self { mu_min, mu_max, sigma, epsilon_b, lower, upper })
    }

    /// Map a raw reward into [0,1], clamping the tails.
    pub fn map(&self, raw: f64) -> f64 {
        ((raw - self.lower) / (self.upper - self.lower)).clamp(0.0, 1.0)
    }
}
