//! Two-armed piecewise-stationary Gaussian bandit environments.
//!
//! Arm means stay constant between change points; change points arrive as a
//! Poisson process (exponential inter-arrival times, aligned to integer
//! steps) with an optional minimum dwell enforced by redrawing short gaps.
//! Every generated mean pair keeps the inter-arm gap at or above `delta_mu`
//! and every change moves both arms by at least `delta_m`.
//!
//! All randomness flows from one root seed split into named independent
//! streams (schedule, means, rewards, policies), so different policies can
//! be replayed against bit-identical environment realizations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from environment construction and mean drawing.
#[derive(Debug, Error)]
pub enum EnvError {
    /// The spec violates its own invariants.
    #[error("invalid environment spec: {0}")]
    InvalidSpec(String),
    /// Rejection sampling could not satisfy the gap/jump constraints.
    #[error("infeasible mean constraints: {0}")]
    InfeasibleMeans(String),
}

/// One of the two arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmId(u8);

impl ArmId {
    pub const FIRST: ArmId = ArmId(0);
    pub const SECOND: ArmId = ArmId(1);
    /// Both arms, in index order.
    pub const BOTH: [ArmId; 2] = [ArmId(0), ArmId(1)];

    /// Build from a zero-based index; only 0 and 1 exist.
    pub fn from_index(index: usize) -> Option<ArmId> {
        match index {
            0 => Some(ArmId(0)),
            1 => Some(ArmId(1)),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn other(self) -> ArmId {
        ArmId(1 - self.0)
    }
}

impl std::fmt::Display for ArmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Named RNG streams split from one root seed.
///
/// Environment streams (schedule, means, rewards) are shared across every
/// policy run on the same seed; each policy draws its own randomness from a
/// per-policy stream.
pub mod streams {
    use super::*;

    pub const SCHEDULE: u64 = 0x01;
    pub const MEANS: u64 = 0x02;
    pub const REWARDS: u64 = 0x03;
    pub const POLICY_BASE: u64 = 0x100;
    pub const SCENARIO: u64 = 0x20;

    /// ChaCha stream `stream` of the generator seeded with `seed`.
    pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }
}

/// Generator parameters for a piecewise-stationary two-armed environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    /// Reward standard deviation σ.
    pub sigma: f64,
    /// Minimum inter-arm mean gap Δ_μ.
    pub delta_mu: f64,
    /// Minimum per-arm jump magnitude Δ_m at each change.
    pub delta_m: f64,
    /// Poisson change rate λ_C (changes per step).
    pub lambda_c: f64,
    /// Minimum steps between changes; short inter-arrivals are redrawn.
    pub min_dwell: u64,
    /// Global lower bound on arm means.
    pub mu_min: f64,
    /// Global upper bound on arm means.
    pub mu_max: f64,
    /// Total number of plays T.
    pub horizon: u64,
    /// Root RNG seed.
    pub seed: u64,
}

impl EnvironmentSpec {
    pub fn validate(&self) -> Result<(), EnvError> {
        if !(self.sigma > 0.0) {
            return Err(EnvError::InvalidSpec(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.delta_mu > 0.0) || !(self.delta_m > 0.0) {
            return Err(EnvError::InvalidSpec(format!(
                "delta_mu and delta_m must be > 0, got {} and {}",
                self.delta_mu, self.delta_m
            )));
        }
        if self.lambda_c < 0.0 {
            return Err(EnvError::InvalidSpec(format!(
                "lambda_c must be >= 0, got {}",
                self.lambda_c
            )));
        }
        if !(self.mu_min < self.mu_max) {
            return Err(EnvError::InvalidSpec(format!(
                "mu_min must be < mu_max, got [{}, {}]",
                self.mu_min, self.mu_max
            )));
        }
        if self.mu_max - self.mu_min < self.delta_mu {
            return Err(EnvError::InvalidSpec(format!(
                "mean range {} is narrower than delta_mu {}",
                self.mu_max - self.mu_min,
                self.delta_mu
            )));
        }
        if self.horizon < 1 {
            return Err(EnvError::InvalidSpec("horizon must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draw change times in `[1, horizon]`, strictly increasing.
///
/// Inter-arrival gaps are exponential(λ_C), redrawn while below
/// `min_dwell`, then rounded up to the next step boundary. A zero rate
/// yields an empty schedule.
pub fn generate_change_schedule(spec: &EnvironmentSpec, rng: &mut ChaCha8Rng) -> Vec<u64> {
    if spec.lambda_c <= 0.0 {
        return Vec::new();
    }
    let exp = Exp::new(spec.lambda_c).expect("positive rate");
    let mut schedule = Vec::new();
    let mut t = 0u64;
    loop {
        let mut gap: f64 = exp.sample(rng);
        while gap < spec.min_dwell as f64 {
            gap = exp.sample(rng);
        }
        let gap_steps = (gap.ceil() as u64).max(1);
        t = t.saturating_add(gap_steps);
        if t > spec.horizon {
            return schedule;
        }
        schedule.push(t);
    }
}

const MEAN_DRAW_ATTEMPTS: usize = 100_000;

/// Draw an initial mean pair: uniform on the square, inter-arm gap enforced.
pub fn draw_initial_means(spec: &EnvironmentSpec, rng: &mut ChaCha8Rng) -> Result<[f64; 2], EnvError> {
    use rand::Rng;
    for _ in 0..MEAN_DRAW_ATTEMPTS {
        let a = rng.random_range(spec.mu_min..=spec.mu_max);
        let b = rng.random_range(spec.mu_min..=spec.mu_max);
        if (a - b).abs() >= spec.delta_mu {
            return Ok([a, b]);
        }
    }
    Err(EnvError::InfeasibleMeans(format!(
        "no initial pair with gap >= {} found in [{}, {}]",
        spec.delta_mu, spec.mu_min, spec.mu_max
    )))
}

/// Draw a post-change mean pair by rejection from the uniform square.
///
/// Accepts pairs meeting the inter-arm gap, the per-arm jump (both arms),
/// and the global bounds. Errors when the constraint set looks infeasible
/// after a bounded number of attempts.
pub fn draw_new_means(
    old_means: [f64; 2],
    spec: &EnvironmentSpec,
    rng: &mut ChaCha8Rng,
) -> Result<[f64; 2], EnvError> {
    use rand::Rng;
    for _ in 0..MEAN_DRAW_ATTEMPTS {
        let a = rng.random_range(spec.mu_min..=spec.mu_max);
        let b = rng.random_range(spec.mu_min..=spec.mu_max);
        if (a - b).abs() >= spec.delta_mu
            && (a - old_means[0]).abs() >= spec.delta_m
            && (b - old_means[1]).abs() >= spec.delta_m
        {
            return Ok([a, b]);
        }
    }
    Err(EnvError::InfeasibleMeans(format!(
        "no pair with gap >= {} and jump >= {} from {:?} found in [{}, {}]",
        spec.delta_mu, spec.delta_m, old_means, spec.mu_min, spec.mu_max
    )))
}

/// Mutable walk state of an environment realization.
#[derive(Debug, Clone)]
pub struct EnvironmentState {
    /// Current per-arm means (μ_1(n), μ_2(n)).
    pub current_means: [f64; 2],
    /// Index into the schedule of the next pending change.
    pub next_change: usize,
    /// Steps at which past changes took effect.
    pub change_log: Vec<u64>,
    /// Current step n.
    pub step: u64,
}

impl EnvironmentState {
    pub fn new(initial_means: [f64; 2]) -> Self {
        Self { current_means: initial_means, next_change: 0, change_log: Vec::new(), step: 0 }
    }

    /// Step index of the next scheduled change, if any.
    pub fn next_change_time(&self, schedule: &[u64]) -> Option<u64> {
        schedule.get(self.next_change).copied()
    }

    /// Arm with the larger current mean (ties toward the first arm).
    pub fn optimal_arm(&self) -> ArmId {
        if self.current_means[0] >= self.current_means[1] {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }
}

/// Sample one reward for `arm` from the current means; does not advance.
pub fn sample_reward(
    state: &EnvironmentState,
    arm: ArmId,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    if sigma == 0.0 {
        return state.current_means[arm.index()];
    }
    let normal = Normal::new(state.current_means[arm.index()], sigma).expect("valid sigma");
    normal.sample(rng)
}

/// Advance the state by one step, applying a scheduled change if due.
pub fn step_environment(
    state: &mut EnvironmentState,
    spec: &EnvironmentSpec,
    schedule: &[u64],
    rng: &mut ChaCha8Rng,
) -> Result<(), EnvError> {
    state.step += 1;
    if let Some(&t) = schedule.get(state.next_change) {
        if t == state.step {
            state.current_means = draw_new_means(state.current_means, spec, rng)?;
            state.change_log.push(t);
            state.next_change += 1;
        }
    }
    Ok(())
}

/// A fully realized environment: the change schedule plus the mean pair of
/// every stationary segment. Pure function of the spec (and its seed), so
/// every policy replays the identical realization.
#[derive(Debug, Clone)]
pub struct EnvTrace {
    pub horizon: u64,
    pub sigma: f64,
    pub schedule: Vec<u64>,
    /// `(start_step, means)` per stationary segment; first entry starts at 0.
    pub segments: Vec<(u64, [f64; 2])>,
}

impl EnvTrace {
    /// Realize a synthetic piecewise-uniform environment from its spec.
    pub fn synthetic(spec: &EnvironmentSpec) -> Result<Self, EnvError> {
        spec.validate()?;
        let mut schedule_rng = streams::rng(spec.seed, streams::SCHEDULE);
        let schedule = generate_change_schedule(spec, &mut schedule_rng);
        let mut means_rng = streams::rng(spec.seed, streams::MEANS);
        let mut means = draw_initial_means(spec, &mut means_rng)?;
        let mut segments = vec![(0u64, means)];
        for &t in &schedule {
            means = draw_new_means(means, spec, &mut means_rng)?;
            segments.push((t, means));
        }
        Ok(Self { horizon: spec.horizon, sigma: spec.sigma, schedule, segments })
    }

    /// Build a trace from an explicit schedule and segment means.
    pub fn from_segments(
        horizon: u64,
        sigma: f64,
        schedule: Vec<u64>,
        segments: Vec<(u64, [f64; 2])>,
    ) -> Self {
        Self { horizon, sigma, schedule, segments }
    }

    /// Means in effect at `step`.
    pub fn means_at(&self, step: u64) -> [f64; 2] {
        match self.segments.binary_search_by_key(&step, |&(s, _)| s) {
            Ok(i) => self.segments[i].1,
            Err(i) => self.segments[i - 1].1,
        }
    }

    /// Arm with the larger mean at `step` (ties toward the first arm).
    pub fn optimal_at(&self, step: u64) -> ArmId {
        let m = self.means_at(step);
        if m[0] >= m[1] {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }

    /// Arm with the larger time-averaged mean over the whole horizon.
    pub fn long_run_best(&self) -> ArmId {
        let mut totals = [0.0f64; 2];
        for (i, &(start, means)) in self.segments.iter().enumerate() {
            let end = self.segments.get(i + 1).map_or(self.horizon, |&(s, _)| s);
            let len = end.saturating_sub(start) as f64;
            totals[0] += means[0] * len;
            totals[1] += means[1] * len;
        }
        if totals[0] >= totals[1] {
            ArmId::FIRST
        } else {
            ArmId::SECOND
        }
    }

    /// Smallest inter-arm gap across segments.
    pub fn min_gap(&self) -> f64 {
        self.segments
            .iter()
            .map(|&(_, m)| (m[0] - m[1]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Walk cursor for sequential replay.
    pub fn cursor(&self) -> TraceCursor<'_> {
        TraceCursor { trace: self, seg: 0 }
    }
}

/// Amortized-O(1) sequential reader of an [`EnvTrace`].
#[derive(Debug, Clone)]
pub struct TraceCursor<'a> {
    trace: &'a EnvTrace,
    seg: usize,
}

impl TraceCursor<'_> {
    /// Means at `step`, assuming non-decreasing query order.
    pub fn means_at(&mut self, step: u64) -> [f64; 2] {
        while self.seg + 1 < self.trace.segments.len() && self.trace.segments[self.seg + 1].0 <= step
        {
            self.seg += 1;
        }
        self.trace.segments[self.seg].1
    }

    /// True when a change takes effect exactly at `step`.
    pub fn change_at(&self, step: u64) -> bool {
        self.trace
            .segments
            .get(self.seg + 1)
            .is_some_and(|&(s, _)| s == step)
            || (self.seg < self.trace.segments.len() && self.trace.segments[self.seg].0 == step && step > 0)
    }
}

/// Regret bookkeeping for one policy run.
#[derive(Debug, Clone)]
pub struct RegretLedger {
    /// Running sum of μ*(n) − μ_played(n).
    pub cumulative_regret: f64,
    /// Optimal arm per step.
    pub per_step_optimal: Vec<ArmId>,
    /// `(step, cumulative_regret)` sampled every `interval` steps.
    pub trajectory: Vec<(u64, f64)>,
    interval: u64,
}

impl RegretLedger {
    /// `interval` controls trajectory thinning; 0 disables sampling.
    pub fn new(interval: u64) -> Self {
        Self {
            cumulative_regret: 0.0,
            per_step_optimal: Vec::new(),
            trajectory: Vec::new(),
            interval,
        }
    }

    /// Record one play at `step` under the given true means.
    pub fn record_play(&mut self, means: [f64; 2], arm: ArmId, step: u64) {
        let best = means[0].max(means[1]);
        self.cumulative_regret += best - means[arm.index()];
        self.per_step_optimal.push(if means[0] >= means[1] { ArmId::FIRST } else { ArmId::SECOND });
        if self.interval > 0 && (step + 1) % self.interval == 0 {
            self.trajectory.push((step + 1, self.cumulative_regret));
        }
    }

    /// Force a trajectory sample (used at change/detection events).
    pub fn snapshot(&mut self, step: u64) {
        self.trajectory.push((step + 1, self.cumulative_regret));
    }
}
