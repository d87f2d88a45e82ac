//! Detection-quality metrics over run records.
//!
//! A detection is matched to the latest change at or before it; a
//! detection with no unclaimed change behind it is a false alarm. A change
//! is missed when no detection lands before the next change (or the end of
//! the run). Delay is measured in steps from the change to its detection.

use serde::Serialize;

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Median of an unsorted slice; NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Sample mean and variance (unbiased) of a slice.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Per-change outcome classification for one run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DetectionStats {
    /// Delay in steps for each change that was detected before the next.
    pub delays: Vec<u64>,
    /// Changes with no detection before the next change (or run end).
    pub misses: u64,
    /// Detections with no unclaimed change behind them.
    pub false_alarms: u64,
    /// Total changes observed.
    pub changes: u64,
    /// Steps in the run.
    pub steps: u64,
}

impl DetectionStats {
    /// Classify a run's detections against its change schedule.
    pub fn classify(changes: &[u64], detections: &[u64], horizon: u64) -> Self {
        let mut stats = DetectionStats {
            changes: changes.len() as u64,
            steps: horizon,
            ..Default::default()
        };
        let mut change_idx = 0usize;
        // Index of the next change not yet claimed by a detection.
        let mut unclaimed = 0usize;
        for &d in detections {
            // Advance to the latest change at or before d.
            while change_idx < changes.len() && changes[change_idx] <= d {
                change_idx += 1;
            }
            if unclaimed < change_idx {
                // Claims the most recent change; earlier unclaimed changes
                // in between were superseded before detection (missed).
                stats.misses += (change_idx - unclaimed - 1) as u64;
                stats.delays.push(d - changes[change_idx - 1]);
                unclaimed = change_idx;
            } else {
                stats.false_alarms += 1;
            }
        }
        // Changes never claimed by any detection.
        stats.misses += (changes.len() - unclaimed) as u64;
        stats
    }

    /// Merge another run's stats into this one.
    pub fn absorb(&mut self, other: &DetectionStats) {
        self.delays.extend_from_slice(&other.delays);
        self.misses += other.misses;
        self.false_alarms += other.false_alarms;
        self.changes += other.changes;
        self.steps += other.steps;
    }

    pub fn median_delay(&self) -> f64 {
        median(&self.delays.iter().map(|&d| d as f64).collect::<Vec<_>>())
    }

    /// Miss fraction with its 95% Wilson interval.
    pub fn miss_rate(&self) -> (f64, (f64, f64)) {
        if self.changes == 0 {
            return (0.0, (0.0, 0.0));
        }
        let rate = self.misses as f64 / self.changes as f64;
        (rate, wilson_interval(self.misses, self.changes, 1.96))
    }

    /// False alarms per step.
    pub fn false_alarm_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.false_alarms as f64 / self.steps as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_brackets_the_proportion() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && hi > 0.5);
        assert!(lo > 0.39 && hi < 0.61);
        let (lo0, hi0) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo0, 0.0);
        assert!(hi0 > 0.0 && hi0 < 0.05);
    }

    #[test]
    fn no_changes_no_detections_is_clean() {
        let s = DetectionStats::classify(&[], &[], 1000);
        assert_eq!(s.false_alarms, 0);
        assert_eq!(s.misses, 0);
        assert!(s.delays.is_empty());
    }

    #[test]
    fn detection_without_change_is_false_alarm() {
        let s = DetectionStats::classify(&[], &[100, 300], 1000);
        assert_eq!(s.false_alarms, 2);
    }

    #[test]
    fn each_change_claimed_once_and_delay_measured() {
        let s = DetectionStats::classify(&[100, 500], &[110, 130, 540], 1000);
        // 110 claims change@100 (delay 10); 130 is a false alarm;
        // 540 claims change@500 (delay 40).
        assert_eq!(s.delays, vec![10, 40]);
        assert_eq!(s.false_alarms, 1);
        assert_eq!(s.misses, 0);
    }

    #[test]
    fn superseded_and_trailing_changes_count_as_misses() {
        // Changes at 100 and 200; first detection only at 250 claims the
        // change at 200, so the one at 100 was missed; change at 900 ends
        // the run undetected.
        let s = DetectionStats::classify(&[100, 200, 900], &[250], 1000);
        assert_eq!(s.delays, vec![50]);
        assert_eq!(s.misses, 2);
        assert_eq!(s.false_alarms, 0);
    }

    #[test]
    fn median_and_variance_helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        let (m, v) = mean_and_variance(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
