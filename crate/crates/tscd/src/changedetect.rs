//! Online change detectors for reward streams.
//!
//! The primary detector splits the most recent rewards of an arm into a
//! *test window* (the last `n_t` samples) and an *estimate window* (the
//! `est_window` samples immediately before it) and flags a change when the
//! two window means differ by at least `delta_c`:
//!
//! ```text
//! | mean(last n_t) − mean(preceding est_window) | ≥ Δ_C
//! ```
//!
//! The windows are contiguous, non-overlapping, and the test window is the
//! suffix of the stream. A Page-Hinkley detector is also provided for the
//! PHT-UCB baseline policy.

use std::collections::VecDeque;

use thiserror::Error;

/// Errors from detector construction.
#[derive(Debug, Error)]
pub enum DetectError {
    /// A window length or threshold violates the detector's invariants.
    #[error("invalid detector config: {0}")]
    InvalidConfig(String),
}

/// Mean-shift detector configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Test-window length (samples).
    pub n_t: usize,
    /// Estimate-window length (samples).
    pub est_window: usize,
    /// Detection threshold (reward units).
    pub delta_c: f64,
}

impl DetectorConfig {
    /// Build a config, rejecting degenerate parameters.
    ///
    /// A non-positive `delta_c` fires on every sample, which happens when
    /// the quantile term σ·Q⁻¹(P_F)/√n_T does not exceed the localization
    /// tolerance ε; such configs are rejected rather than silently firing.
    pub fn new(n_t: usize, est_window: usize, delta_c: f64) -> Result<Self, DetectError> {
        if n_t < 1 {
            return Err(DetectError::InvalidConfig("n_t must be >= 1".into()));
        }
        if est_window < 1 {
            return Err(DetectError::InvalidConfig("est_window must be >= 1".into()));
        }
        if !(delta_c > 0.0) {
            return Err(DetectError::InvalidConfig(format!(
                "delta_c must be > 0, got {delta_c}; a non-positive threshold detects on \
                 every sample (the false-alarm quantile term must exceed the localization \
                 tolerance)"
            )));
        }
        Ok(Self { n_t, est_window, delta_c })
    }

    /// Samples needed before the detector can run a test.
    pub fn required_samples(&self) -> usize {
        self.n_t + self.est_window
    }
}

/// Outcome of one mean-shift test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorVerdict {
    /// Whether enough samples existed to run the test.
    pub checked: bool,
    /// Whether the statistic met the threshold.
    pub detected: bool,
    /// |mean(test) − mean(estimate)| (reward units); 0 when unchecked.
    pub statistic: f64,
    /// Signed difference mean(test) − mean(estimate); 0 when unchecked.
    pub delta: f64,
}

impl DetectorVerdict {
    /// Verdict for a stream that is still too short to test.
    pub fn unchecked() -> Self {
        Self { checked: false, detected: false, statistic: 0.0, delta: 0.0 }
    }
}

/// Run the mean-shift test on an ordered reward sequence.
///
/// Pure function of `(rewards, cfg)`: the test window is the suffix of
/// length `cfg.n_t`, the estimate window the `cfg.est_window` samples
/// before it. Detection uses `>=` at the threshold.
pub fn run_test(rewards: &[f64], cfg: &DetectorConfig) -> DetectorVerdict {
    let needed = cfg.required_samples();
    if rewards.len() < needed {
        return DetectorVerdict::unchecked();
    }
    let n = rewards.len();
    let test = &rewards[n - cfg.n_t..];
    let est = &rewards[n - needed..n - cfg.n_t];
    let mean_test = test.iter().sum::<f64>() / cfg.n_t as f64;
    let mean_est = est.iter().sum::<f64>() / cfg.est_window as f64;
    let delta = mean_test - mean_est;
    let statistic = delta.abs();
    DetectorVerdict { checked: true, detected: statistic >= cfg.delta_c, statistic, delta }
}

/// Bounded reward buffer plus the detector, for one monitored arm.
///
/// Keeps only the last `n_t + est_window` rewards and maintains rolling
/// window sums, so each push-and-test is O(1). The test never reads
/// further back than the two windows.
#[derive(Debug, Clone)]
pub struct SlidingDetector {
    cfg: DetectorConfig,
    window: VecDeque<f64>,
    test_sum: f64,
    est_sum: f64,
}

impl SlidingDetector {
    pub fn new(cfg: DetectorConfig) -> Self {
        let cap = cfg.required_samples();
        Self { cfg, window: VecDeque::with_capacity(cap), test_sum: 0.0, est_sum: 0.0 }
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.cfg
    }

    /// Append one reward without testing.
    pub fn push(&mut self, reward: f64) {
        // The newest n_t samples form the test window; anything it evicts
        // enters the estimate window, whose own overflow is discarded.
        self.window.push_back(reward);
        self.test_sum += reward;
        if self.window.len() > self.cfg.n_t {
            let demoted = self.window[self.window.len() - self.cfg.n_t - 1];
            self.test_sum -= demoted;
            self.est_sum += demoted;
        }
        if self.window.len() > self.cfg.required_samples() {
            let evicted = self.window.pop_front().expect("non-empty");
            self.est_sum -= evicted;
        }
    }

    /// Test the current window without pushing.
    pub fn test(&self) -> DetectorVerdict {
        if self.window.len() < self.cfg.required_samples() {
            return DetectorVerdict::unchecked();
        }
        let delta =
            self.test_sum / self.cfg.n_t as f64 - self.est_sum / self.cfg.est_window as f64;
        let statistic = delta.abs();
        DetectorVerdict { checked: true, detected: statistic >= self.cfg.delta_c, statistic, delta }
    }

    /// Push one reward and run the test on the resulting window.
    pub fn push_and_test(&mut self, reward: f64) -> DetectorVerdict {
        self.push(reward);
        self.test()
    }

    /// Number of buffered rewards.
    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    /// Drop all buffered rewards.
    pub fn reset(&mut self) {
        self.window.clear();
        self.test_sum = 0.0;
        self.est_sum = 0.0;
    }
}

/// Page-Hinkley drift detector, two-sided.
///
/// Maintains the running mean of the stream since the last reset and the
/// cumulative deviations
///
/// ```text
/// inc_t = Σ (x_s − mean_s − δ)    alarm when inc_t − min inc_s > λ
/// dec_t = Σ (x_s − mean_s + δ)    alarm when max dec_s − dec_t > λ
/// ```
///
/// so both upward and downward mean shifts raise the alarm. State clears
/// after an alarm.
#[derive(Debug, Clone)]
pub struct PageHinkley {
    delta: f64,
    lambda: f64,
    n: u64,
    mean: f64,
    inc_sum: f64,
    inc_min: f64,
    dec_sum: f64,
    dec_max: f64,
}

impl PageHinkley {
    /// `delta` is the drift tolerance, `lambda` the alarm threshold.
    pub fn new(delta: f64, lambda: f64) -> Result<Self, DetectError> {
        if !(lambda > 0.0) {
            return Err(DetectError::InvalidConfig(format!("pht lambda must be > 0, got {lambda}")));
        }
        if delta < 0.0 {
            return Err(DetectError::InvalidConfig(format!("pht delta must be >= 0, got {delta}")));
        }
        Ok(Self {
            delta,
            lambda,
            n: 0,
            mean: 0.0,
            inc_sum: 0.0,
            inc_min: 0.0,
            dec_sum: 0.0,
            dec_max: 0.0,
        })
    }

    /// Feed one observation; returns true on alarm (state then resets).
    pub fn step(&mut self, x: f64) -> bool {
        self.n += 1;
        self.mean += (x - self.mean) / self.n as f64;
        self.inc_sum += x - self.mean - self.delta;
        self.inc_min = self.inc_min.min(self.inc_sum);
        self.dec_sum += x - self.mean + self.delta;
        self.dec_max = self.dec_max.max(self.dec_sum);
        let alarm = (self.inc_sum - self.inc_min > self.lambda)
            || (self.dec_max - self.dec_sum > self.lambda);
        if alarm {
            self.reset();
        }
        alarm
    }

    /// Clear all accumulated state.
    pub fn reset(&mut self) {
        self.n = 0;
        self.mean = 0.0;
        self.inc_sum = 0.0;
        self.inc_min = 0.0;
        self.dec_sum = 0.0;
        self.dec_max = 0.0;
    }

    /// Observations since the last reset.
    pub fn count(&self) -> u64 {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn cfg(n_t: usize, est: usize, dc: f64) -> DetectorConfig {
        DetectorConfig::new(n_t, est, dc).unwrap()
    }

    #[test]
    fn config_rejects_degenerate_parameters() {
        assert!(DetectorConfig::new(0, 5, 0.1).is_err());
        assert!(DetectorConfig::new(5, 0, 0.1).is_err());
        assert!(DetectorConfig::new(5, 5, 0.0).is_err());
        assert!(DetectorConfig::new(5, 5, -0.3).is_err());
    }

    #[test]
    fn constant_sequence_never_detects() {
        let c = cfg(4, 8, 0.01);
        let rewards = vec![2.5; 30];
        let v = run_test(&rewards, &c);
        assert!(v.checked);
        assert!(!v.detected);
        assert_eq!(v.statistic, 0.0);
    }

    #[test]
    fn step_sequence_detects_with_exact_statistic() {
        // est_window zeros then n_t ones: statistic exactly 1.
        let c = cfg(6, 10, 0.5);
        let mut rewards = vec![0.0; 10];
        rewards.extend(vec![1.0; 6]);
        let v = run_test(&rewards, &c);
        assert!(v.checked && v.detected);
        assert!((v.statistic - 1.0).abs() < 1e-15);
        assert!(v.delta > 0.0);
    }

    #[test]
    fn short_stream_is_unchecked() {
        let c = cfg(6, 10, 0.5);
        let v = run_test(&vec![1.0; 15], &c);
        assert!(!v.checked && !v.detected);
    }

    #[test]
    fn threshold_boundary_uses_greater_or_equal() {
        let c = cfg(2, 2, 1.0);
        // means: est = 0, test = 1 -> statistic exactly at the threshold.
        let v = run_test(&[0.0, 0.0, 1.0, 1.0], &c);
        assert!(v.detected);
    }

    #[test]
    fn sliding_detector_matches_direct_evaluation() {
        let c = cfg(3, 5, 0.2);
        let mut sliding = SlidingDetector::new(c);
        let mut history: Vec<f64> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let normal = Normal::new(0.0, 1.0).unwrap();
        for i in 0..2000 {
            let x: f64 = normal.sample(&mut rng) + if i > 1200 { 3.0 } else { 0.0 };
            history.push(x);
            let from_sliding = sliding.push_and_test(x);
            let start = history.len().saturating_sub(c.required_samples());
            let from_direct = run_test(&history[start..], &c);
            assert_eq!(from_sliding.checked, from_direct.checked, "step {i}");
            // Rolling sums accumulate harmless f64 drift; compare loosely.
            assert!(
                (from_sliding.statistic - from_direct.statistic).abs() < 1e-9,
                "diverged at step {i}: {from_sliding:?} vs {from_direct:?}"
            );
        }
        assert_eq!(sliding.len(), c.required_samples());
    }

    #[test]
    fn page_hinkley_constant_stream_never_alarms() {
        for &delta in &[0.0, 0.01, 0.5] {
            let mut ph = PageHinkley::new(delta, 0.1).unwrap();
            for _ in 0..10_000 {
                assert!(!ph.step(1.234));
            }
        }
    }

    #[test]
    fn page_hinkley_alarms_on_large_step_change() {
        let lambda = 0.5;
        let mut ph = PageHinkley::new(0.01, lambda).unwrap();
        for _ in 0..50 {
            assert!(!ph.step(0.0));
        }
        // Shift of 10 lambda: the statistic must cross within a handful of
        // observations.
        let mut alarmed_at = None;
        for i in 0..20 {
            if ph.step(10.0 * lambda) {
                alarmed_at = Some(i);
                break;
            }
        }
        assert!(alarmed_at.is_some(), "no alarm within 20 post-change steps");
        assert_eq!(ph.count(), 0, "state must reset after alarm");
    }

    #[test]
    fn page_hinkley_alarm_time_non_increasing_in_shift() {
        // Paired noise realizations, increasing shift magnitude.
        let shifts = [0.5, 1.0, 2.0, 4.0, 8.0];
        let mut prev_mean_delay = f64::INFINITY;
        for &shift in &shifts {
            let mut total = 0.0;
            for seed in 0..40u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let normal = Normal::new(0.0, 0.3).unwrap();
                let mut ph = PageHinkley::new(0.01, 1.0).unwrap();
                for _ in 0..100 {
                    ph.step(normal.sample(&mut rng));
                }
                let mut delay = 400;
                for i in 0..400 {
                    if ph.step(normal.sample(&mut rng) - shift) {
                        delay = i;
                        break;
                    }
                }
                total += delay as f64;
            }
            let mean_delay = total / 40.0;
            assert!(
                mean_delay <= prev_mean_delay + 1e-9,
                "delay grew from {prev_mean_delay} to {mean_delay} at shift {shift}"
            );
            prev_mean_delay = mean_delay;
        }
    }

    proptest! {
        #[test]
        fn run_test_is_pure(rewards in proptest::collection::vec(-10.0..10.0f64, 0..60)) {
            let c = cfg(3, 4, 0.25);
            prop_assert_eq!(run_test(&rewards, &c), run_test(&rewards, &c));
        }

        #[test]
        fn detection_monotone_in_suffix_shift(
            rewards in proptest::collection::vec(-5.0..5.0f64, 12..40),
            shift in 0.0..5.0f64,
        ) {
            // Enlarging the true shift (adding to the suffix, away from the
            // estimate mean) never turns a detection into a non-detection.
            let c = cfg(4, 6, 0.8);
            let base = run_test(&rewards, &c);
            let mut shifted = rewards.clone();
            let n = shifted.len();
            let sign = if base.delta >= 0.0 { 1.0 } else { -1.0 };
            for x in &mut shifted[n - 4..] {
                *x += sign * shift;
            }
            let moved = run_test(&shifted, &c);
            if base.detected {
                prop_assert!(moved.detected);
            }
        }

        #[test]
        fn statistic_shift_invariant_and_scale_equivariant(
            rewards in proptest::collection::vec(-5.0..5.0f64, 12..40),
            offset in -20.0..20.0f64,
            scale in -4.0..4.0f64,
        ) {
            let c = cfg(4, 6, 0.8);
            let base = run_test(&rewards, &c);
            let shifted: Vec<f64> = rewards.iter().map(|x| x + offset).collect();
            let scaled: Vec<f64> = rewards.iter().map(|x| x * scale).collect();
            let v_shift = run_test(&shifted, &c);
            let v_scale = run_test(&scaled, &c);
            prop_assert!((v_shift.statistic - base.statistic).abs() < 1e-9);
            prop_assert!((v_scale.statistic - scale.abs() * base.statistic).abs() < 1e-9);
        }

        #[test]
        fn verdict_invariant_detected_implies_checked_and_threshold(
            rewards in proptest::collection::vec(-5.0..5.0f64, 0..40),
        ) {
            let c = cfg(4, 6, 0.3);
            let v = run_test(&rewards, &c);
            if v.detected {
                prop_assert!(v.checked);
                prop_assert!(v.statistic >= c.delta_c);
            }
        }
    }
}
