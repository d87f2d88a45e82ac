//! Comparison policies: classical TS, discounted/sliding-window UCB,
//! discounted TS, REXP3, Page-Hinkley UCB, and the clairvoyant Fixed and
//! Oracle references.
//!
//! Index policies and EXP3 operate on mapped rewards in [0,1]; the
//! Page-Hinkley detector in PHT-UCB watches raw rewards so its thresholds
//! share units with the environment's jump sizes.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mapper::RewardMapper;
use super::{bernoulli, thompson_argmax, Policy, PolicyError, StepOutcome};
use crate::bandit::{ArmId, EnvTrace};
use crate::changedetect::PageHinkley;

/// Tunable parameters for every baseline, with documented defaults.
///
/// Defaults come from a small grid search over the wireless tuning
/// configuration (see the `baseline_tuning` example); the source material
/// for these policies fixes none of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    /// D-UCB discount factor γ ∈ (0,1).
    pub ducb_discount: f64,
    /// D-UCB exploration coefficient ξ.
    pub ducb_xi: f64,
    /// SW-UCB window length τ.
    pub sw_window: usize,
    /// SW-UCB exploration coefficient ξ.
    pub sw_xi: f64,
    /// Discounted-TS discount γ ∈ (0,1].
    pub dts_discount: f64,
    /// REXP3 restart batch length.
    pub rexp3_batch: u64,
    /// EXP3 exploration rate γ_e ∈ (0,1].
    pub rexp3_gamma: f64,
    /// Page-Hinkley drift tolerance δ (raw reward units).
    pub pht_delta: f64,
    /// Page-Hinkley alarm threshold λ (raw reward units).
    pub pht_lambda: f64,
    /// UCB exploration coefficient inside PHT-UCB.
    pub pht_xi: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            ducb_discount: 0.995,
            ducb_xi: 0.1,
            sw_window: 200,
            sw_xi: 0.1,
            dts_discount: 0.995,
            rexp3_batch: 1000,
            rexp3_gamma: 0.15,
            pht_delta: 0.02,
            pht_lambda: 2.0,
            pht_xi: 0.1,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let in_unit = |name: &str, v: f64, closed_top: bool| {
            let ok = v > 0.0 && (v < 1.0 || (closed_top && v <= 1.0));
            if ok {
                Ok(())
            } else {
                Err(PolicyError::InvalidConfig(format!("{name} out of range: {v}")))
            }
        };
        in_unit("ducb_discount", self.ducb_discount, false)?;
        in_unit("dts_discount", self.dts_discount, true)?;
        in_unit("rexp3_gamma", self.rexp3_gamma, true)?;
        for (name, v) in [
            ("ducb_xi", self.ducb_xi),
            ("sw_xi", self.sw_xi),
            ("pht_lambda", self.pht_lambda),
            ("pht_xi", self.pht_xi),
        ] {
            if !(v > 0.0) {
                return Err(PolicyError::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.pht_delta < 0.0 {
            return Err(PolicyError::InvalidConfig(format!(
                "pht_delta must be >= 0, got {}",
                self.pht_delta
            )));
        }
        if self.sw_window == 0 || self.rexp3_batch == 0 {
            return Err(PolicyError::InvalidConfig(
                "sw_window and rexp3_batch must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Classical Bernoulli Thompson sampling on mapped rewards.
#[derive(Debug, Clone)]
pub struct ClassicalTs {
    mapper: RewardMapper,
    plays: [u64; 2],
    successes: [u64; 2],
}

impl ClassicalTs {
    pub fn new(mapper: RewardMapper) -> Self {
        Self { mapper, plays: [0; 2], successes: [0; 2] }
    }
}

impl Policy for ClassicalTs {
    fn select(&mut self, rng: &mut ChaCha8Rng) -> ArmId {
        let post = |j: usize| {
            (self.successes[j] as f64 + 1.0, (self.plays[j] - self.successes[j]) as f64 + 1.0)
        };
        thompson_argmax([post(0), post(1)], rng)
    }

    fn observe(&mut self, arm: ArmId, raw: f64, rng: &mut ChaCha8Rng) -> StepOutcome {
        let mapped = self.mapper.map(raw);
        let j = arm.index();
        self.plays[j] += 1;
        if bernoulli(mapped, rng) {
            self.successes[j] += 1;
        }
        StepOutcome { mapped: Some(mapped), ..Default::default() }
    }

    fn kind(&self) -> &'static str {
        "ts"
    }
}

/// Discounted Thompson sampling: Beta pseudo-counts decay by γ each step.
#[derive(Debug, Clone)]
pub struct DiscountedTs {
    mapper: RewardMapper,
    discount: f64,
    successes: [f64; 2],
    failures: [f64; 2],
}

impl DiscountedTs {
    pub fn new(mapper: RewardMapper, discount: f64) -> Result<Self, PolicyError> {
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(PolicyError::InvalidConfig(format!(
                "dts discount must be in (0,1], got {discount}"
            )));
        }
        Ok(Self { mapper, discount, successes: [0.0; 2], failures: [0.0; 2] })
    }
}

impl Policy for DiscountedTs {
    fn select(&mut self, rng: &mut ChaCha8Rng) -> ArmId {
        let post = |j: usize| (self.successes[j] + 1.0, self.failures[j] + 1.0);
        thompson_argmax([post(0), post(1)], rng)
    }

    fn observe(&mut self, arm: ArmId, raw: f64, rng: &mut ChaCha8Rng) -> StepOutcome {
        let mapped = self.mapper.map(raw);
        let success = bernoulli(mapped, rng);
        for j in 0..2 {
            self.successes[j] *= self.discount;
            self.failures[j] *= self.discount;
        }
        let j = arm.index();
        if success {
            self.successes[j] += 1.0;
        } else {
            self.failures[j] += 1.0;
        }
        StepOutcome { mapped: Some(mapped), ..Default::default() }
    }

    fn kind(&self) -> &'static str {
        "dts"
    }
}

/// Discounted UCB: exponentially discounted counts and means with an
/// exploration bonus 2·sqrt(ξ·ln(n_γ)/N_j).
#[derive(Debug, Clone)]
pub struct DiscountedUcb {
    mapper: RewardMapper,
    discount: f64,
    xi: f64,
    counts: [f64; 2],
    sums: [f64; 2],
    t: u64,
}

impl DiscountedUcb {
    pub fn new(mapper: RewardMapper, discount: f64, xi: f64) -> Result<Self, PolicyError> {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(PolicyError::InvalidConfig(format!(
                "ducb discount must be in (0,1), got {discount}"
            )));
        }
        Ok(Self { mapper, discount, xi, counts: [0.0; 2], sums: [0.0; 2], t: 0 })
    }
}

impl Policy for DiscountedUcb {
    fn select(&mut self, _rng: &mut ChaCha8Rng) -> ArmId {
        // Forced first plays.
        for arm in ArmId::BOTH {
            if self.counts[arm.index()] < 1e-9 {
                return arm;
            }
        }
        let total = self.counts[0] + self.counts[1];
        let index = |j: usize| {
            self.sums[j] / self.counts[j] + 2.0 * (self.xi * total.ln() / self.counts[j]).sqrt()
        };
        if index(0) >= index(1) {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }

    fn observe(&mut self, arm: ArmId, raw: f64, _rng: &mut ChaCha8Rng) -> StepOutcome {
        let mapped = self.mapper.map(raw);
        for j in 0..2 {
            self.counts[j] *= self.discount;
            self.sums[j] *= self.discount;
        }
        self.counts[arm.index()] += 1.0;
        self.sums[arm.index()] += mapped;
        self.t += 1;
        StepOutcome { mapped: Some(mapped), ..Default::default() }
    }

    fn kind(&self) -> &'static str {
        "ducb"
    }
}

/// Sliding-window UCB: counts and means over the last τ plays.
#[derive(Debug, Clone)]
pub struct SlidingWindowUcb {
    mapper: RewardMapper,
    window: usize,
    xi: f64,
    history: std::collections::VecDeque<(ArmId, f64)>,
    counts: [u64; 2],
    sums: [f64; 2],
    t: u64,
}

impl SlidingWindowUcb {
    pub fn new(mapper: RewardMapper, window: usize, xi: f64) -> Result<Self, PolicyError> {
        if window == 0 {
            return Err(PolicyError::InvalidConfig("sw window must be >= 1".into()));
        }
        Ok(Self {
            mapper,
            window,
            xi,
            history: std::collections::VecDeque::with_capacity(window),
            counts: [0; 2],
            sums: [0.0; 2],
            t: 0,
        })
    }
}

impl Policy for SlidingWindowUcb {
    fn select(&mut self, _rng: &mut ChaCha8Rng) -> ArmId {
        for arm in ArmId::BOTH {
            if self.counts[arm.index()] == 0 {
                return arm;
            }
        }
        let horizon = (self.t.min(self.window as u64)) as f64;
        let index = |j: usize| {
            self.sums[j] / self.counts[j] as f64
                + (self.xi * horizon.ln() / self.counts[j] as f64).sqrt()
        };
        if index(0) >= index(1) {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }

    fn observe(&mut self, arm: ArmId, raw: f64, _rng: &mut ChaCha8Rng) -> StepOutcome {
        let mapped = self.mapper.map(raw);
        if self.history.len() == self.window {
            let (old_arm, old_val) = self.history.pop_front().expect("non-empty");
            self.counts[old_arm.index()] -= 1;
            self.sums[old_arm.index()] -= old_val;
        }
        self.history.push_back((arm, mapped));
        self.counts[arm.index()] += 1;
        self.sums[arm.index()] += mapped;
        self.t += 1;
        StepOutcome { mapped: Some(mapped), ..Default::default() }
    }

    fn kind(&self) -> &'static str {
        "swucb"
    }
}

/// REXP3: EXP3 with importance-weighted updates, restarted every batch.
#[derive(Debug, Clone)]
pub struct Rexp3 {
    mapper: RewardMapper,
    batch: u64,
    gamma: f64,
    weights: [f64; 2],
    last_probs: [f64; 2],
    step_in_batch: u64,
}

impl Rexp3 {
    pub fn new(mapper: RewardMapper, batch: u64, gamma: f64) -> Result<Self, PolicyError> {
        if batch == 0 {
            return Err(PolicyError::InvalidConfig("rexp3 batch must be >= 1".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(PolicyError::InvalidConfig(format!(
                "rexp3 gamma must be in (0,1], got {gamma}"
            )));
        }
        Ok(Self {
            mapper,
            batch,
            gamma,
            weights: [1.0; 2],
            last_probs: [0.5; 2],
            step_in_batch: 0,
        })
    }

    fn probs(&self) -> [f64; 2] {
        let total = self.weights[0] + self.weights[1];
        let mut p = [0.0; 2];
        for j in 0..2 {
            p[j] = (1.0 - self.gamma) * self.weights[j] / total + self.gamma / 2.0;
        }
        p
    }
}

impl Policy for Rexp3 {
    fn select(&mut self, rng: &mut ChaCha8Rng) -> ArmId {
        use rand::Rng;
        let p = self.probs();
        self.last_probs = p;
        let u: f64 = rng.random();
        if u < p[0] {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }

    fn observe(&mut self, arm: ArmId, raw: f64, _rng: &mut ChaCha8Rng) -> StepOutcome {
        let mapped = self.mapper.map(raw);
        let j = arm.index();
        let estimate = mapped / self.last_probs[j];
        self.weights[j] *= (self.gamma * estimate / 2.0).exp();
        // Rescale to dodge overflow; probabilities are scale-free.
        let top = self.weights[0].max(self.weights[1]);
        if top > 1e100 {
            self.weights[0] /= top;
            self.weights[1] /= top;
        }
        self.step_in_batch += 1;
        let mut outcome = StepOutcome { mapped: Some(mapped), ..Default::default() };
        if self.step_in_batch >= self.batch {
            self.weights = [1.0; 2];
            self.step_in_batch = 0;
            outcome.reset = true;
        }
        outcome
    }

    fn kind(&self) -> &'static str {
        "rexp3"
    }
}

/// UCB1 that fully restarts when a per-arm Page-Hinkley detector alarms.
#[derive(Debug, Clone)]
pub struct PhtUcb {
    mapper: RewardMapper,
    xi: f64,
    detectors: [PageHinkley; 2],
    counts: [u64; 2],
    sums: [f64; 2],
    t: u64,
}

impl PhtUcb {
    pub fn new(
        mapper: RewardMapper,
        xi: f64,
        pht_delta: f64,
        pht_lambda: f64,
    ) -> Result<Self, PolicyError> {
        let make = || {
            PageHinkley::new(pht_delta, pht_lambda)
                .map_err(|e| PolicyError::InvalidConfig(e.to_string()))
        };
        Ok(Self {
            mapper,
            xi,
            detectors: [make()?, make()?],
            counts: [0; 2],
            sums: [0.0; 2],
            t: 0,
        })
    }

    fn restart(&mut self) {
        self.counts = [0; 2];
        self.sums = [0.0; 2];
        self.t = 0;
        for d in &mut self.detectors {
            d.reset();
        }
    }
}

impl Policy for PhtUcb {
    fn select(&mut self, _rng: &mut ChaCha8Rng) -> ArmId {
        for arm in ArmId::BOTH {
            if self.counts[arm.index()] == 0 {
                return arm;
            }
        }
        let t = self.t as f64;
        let index = |j: usize| {
            self.sums[j] / self.counts[j] as f64
                + (self.xi * t.ln() / self.counts[j] as f64).sqrt()
        };
        if index(0) >= index(1) {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }

    fn observe(&mut self, arm: ArmId, raw: f64, _rng: &mut ChaCha8Rng) -> StepOutcome {
        let mapped = self.mapper.map(raw);
        let j = arm.index();
        self.counts[j] += 1;
        self.sums[j] += mapped;
        self.t += 1;
        // The drift detector watches the raw stream of the played arm.
        let alarm = self.detectors[j].step(raw);
        if alarm {
            self.restart();
            StepOutcome { mapped: Some(mapped), detection: true, reset: true, ..Default::default() }
        } else {
            StepOutcome { mapped: Some(mapped), ..Default::default() }
        }
    }

    fn kind(&self) -> &'static str {
        "phtucb"
    }
}

/// Always plays the arm with the larger time-averaged true mean over the
/// whole horizon. Clairvoyant: built from the environment realization.
#[derive(Debug, Clone)]
pub struct FixedPolicy {
    arm: ArmId,
}

impl FixedPolicy {
    pub fn from_trace(trace: &EnvTrace) -> Self {
        Self { arm: trace.long_run_best() }
    }

    pub fn new(arm: ArmId) -> Self {
        Self { arm }
    }
}

impl Policy for FixedPolicy {
    fn select(&mut self, _rng: &mut ChaCha8Rng) -> ArmId {
        self.arm
    }

    fn observe(&mut self, _arm: ArmId, _raw: f64, _rng: &mut ChaCha8Rng) -> StepOutcome {
        StepOutcome::default()
    }

    fn kind(&self) -> &'static str {
        "fixed"
    }
}

/// Plays the currently optimal arm. Clairvoyant regret reference.
#[derive(Debug, Clone)]
pub struct OraclePolicy {
    /// `(segment_start, optimal_arm)` per stationary segment.
    segments: Vec<(u64, ArmId)>,
    cursor: usize,
    step: u64,
}

impl OraclePolicy {
    pub fn from_trace(trace: &EnvTrace) -> Self {
        let segments = trace
            .segments
            .iter()
            .map(|&(start, m)| {
                (start, if m[0] >= m[1] { ArmId::FIRST } else { ArmId::SECOND })
            })
            .collect();
        Self { segments, cursor: 0, step: 0 }
    }
}

impl Policy for OraclePolicy {
    fn select(&mut self, _rng: &mut ChaCha8Rng) -> ArmId {
        while self.cursor + 1 < self.segments.len() && self.segments[self.cursor + 1].0 <= self.step
        {
            self.cursor += 1;
        }
        self.segments[self.cursor].1
    }

    fn observe(&mut self, _arm: ArmId, _raw: f64, _rng: &mut ChaCha8Rng) -> StepOutcome {
        self.step += 1;
        StepOutcome::default()
    }

    fn kind(&self) -> &'static str {
        "oracle"
    }
}
