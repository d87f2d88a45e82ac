//! Bandit policies behind one contract: [`Policy::select`] picks an arm,
//! [`Policy::observe`] feeds the raw reward back.
//!
//! The actively adaptive policy of interest is [`TscdPolicy`] (Thompson
//! sampling with change detection). The comparison set covers classical
//! Thompson sampling, discounted UCB, sliding-window UCB, discounted
//! Thompson sampling, REXP3, Page-Hinkley UCB, and the clairvoyant
//! references `Fixed` (best long-run arm) and `Oracle` (current best arm).
//! Clairvoyant policies are constructed *with* the environment realization;
//! honest policies only ever see their own rewards.

pub mod baselines;
pub mod mapper;
pub mod tscd;

pub use baselines::{
    BaselineConfig, ClassicalTs, DiscountedTs, DiscountedUcb, FixedPolicy, OraclePolicy, PhtUcb,
    Rexp3, SlidingWindowUcb,
};
pub use mapper::RewardMapper;
pub use tscd::{Phase, TscdConfig, TscdPolicy};

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bandit::ArmId;
use crate::changedetect::DetectorVerdict;

/// Errors from policy construction.
#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("invalid policy config: {0}")]
    InvalidConfig(String),
}

/// What a policy reports back after absorbing one reward.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepOutcome {
    /// Mapped reward in [0,1], when the policy maps rewards.
    pub mapped: Option<f64>,
    /// Mean-shift detector verdict, when one ran this step.
    pub verdict: Option<DetectorVerdict>,
    /// True when the policy declared a change this step (and reset).
    pub detection: bool,
    /// True when internal state was cleared this step.
    pub reset: bool,
}

/// Common contract for every policy.
pub trait Policy {
    /// Choose the arm to play this step.
    fn select(&mut self, rng: &mut ChaCha8Rng) -> ArmId;
    /// Absorb the raw reward for the arm just played.
    fn observe(&mut self, arm: ArmId, raw_reward: f64, rng: &mut ChaCha8Rng) -> StepOutcome;
    /// Short stable identifier ("tscd", "ducb", ...).
    fn kind(&self) -> &'static str;
}

/// Draw from Beta(s+1, n−s+1) for each arm and return the argmax.
///
/// Ties break toward the first arm. Consumes exactly two Beta draws.
pub(crate) fn thompson_argmax(
    posteriors: [(f64, f64); 2],
    rng: &mut ChaCha8Rng,
) -> ArmId {
    use rand_distr::{Beta, Distribution};
    let theta0 = Beta::new(posteriors[0].0, posteriors[0].1).expect("valid beta").sample(rng);
    let theta1 = Beta::new(posteriors[1].0, posteriors[1].1).expect("valid beta").sample(rng);
    if theta0 >= theta1 {
        ArmId::FIRST
    } else {
        ArmId::SECOND
    }
}

/// Bernoulli trial with success probability `p` (clamped to [0,1]).
pub(crate) fn bernoulli(p: f64, rng: &mut ChaCha8Rng) -> bool {
    use rand::Rng;
    let u: f64 = rng.random();
    u < p.clamp(0.0, 1.0)
}
