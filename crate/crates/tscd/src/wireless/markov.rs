//! Two-state Markov reward environment for the RAT-selection experiment.
//!
//! The user's visibility state toggles LOS → NLOS → LOS → ... at the
//! change times of the shared Poisson schedule, and both arms' means
//! switch simultaneously through the coverage mean table.

use super::coverage::MeanTable;
use super::Visibility;
use crate::bandit::EnvTrace;

/// Walkable two-state environment.
#[derive(Debug, Clone)]
pub struct MarkovRatEnvironment {
    pub table: MeanTable,
    pub state: Visibility,
    pub schedule: Vec<u64>,
    pub change_log: Vec<u64>,
    next_change: usize,
    pub step: u64,
}

impl MarkovRatEnvironment {
    /// Start in LOS at step 0 with the given change schedule.
    pub fn new(table: MeanTable, schedule: Vec<u64>) -> Self {
        Self {
            table,
            state: Visibility::Los,
            schedule,
            change_log: Vec::new(),
            next_change: 0,
            step: 0,
        }
    }

    /// Current arm means (arm 0 = sub-6, arm 1 = mm-wave).
    pub fn current_means(&self) -> [f64; 2] {
        self.table.arm_means(self.state)
    }
}

/// Advance the environment one step, toggling at scheduled change times.
pub fn step_markov_env(env: &mut MarkovRatEnvironment) {
    env.step += 1;
    if let Some(&t) = env.schedule.get(env.next_change) {
        if t == env.step {
            env.state = env.state.toggled();
            env.change_log.push(t);
            env.next_change += 1;
        }
    }
}

/// Realize the toggle environment as an [`EnvTrace`] for the runner.
pub fn markov_trace(table: &MeanTable, schedule: Vec<u64>, horizon: u64, sigma: f64) -> EnvTrace {
    let mut segments = Vec::with_capacity(schedule.len() + 1);
    let mut state = Visibility::Los;
    segments.push((0u64, table.arm_means(state)));
    for &t in &schedule {
        state = state.toggled();
        segments.push((t, table.arm_means(state)));
    }
    EnvTrace::from_segments(horizon, sigma, schedule, segments)
}
