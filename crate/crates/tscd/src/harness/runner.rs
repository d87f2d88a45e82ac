//! Batch experiment runner with CSV + manifest persistence.
//!
//! Every policy in a run sees the identical environment realization per
//! seed: the schedule, segment means, and the per-step Gaussian noise all
//! come from seed-keyed streams independent of policy behavior, so
//! comparisons are paired. Seeds run in parallel; results are reduced in
//! seed order, making outputs byte-identical across reruns (the manifest
//! embeds the resolved config so a run can be reproduced from it alone).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{EnvironmentKind, ExperimentConfig};
use super::metrics::DetectionStats;
use super::HarnessError;
use crate::bandit::{streams, EnvTrace, RegretLedger};
use crate::policies::{
    BaselineConfig, ClassicalTs, DiscountedTs, DiscountedUcb, FixedPolicy, OraclePolicy, PhtUcb,
    Policy, Rexp3, RewardMapper, SlidingWindowUcb, TscdConfig, TscdPolicy,
};
use crate::wireless::{build_mean_table, markov_trace, MeanTable, ServingPathloss, WirelessScenario};

/// Thinned per-step log row.
#[derive(Debug, Clone, Serialize)]
pub struct StepRow {
    pub seed: u64,
    pub policy: String,
    pub step: u64,
    pub arm: u8,
    pub raw_reward: f64,
    pub mapped_reward: Option<f64>,
    pub mu0: f64,
    pub mu1: f64,
    pub phase: &'static str,
    pub checked: bool,
    pub detected: bool,
    pub statistic: f64,
    pub reset: bool,
    pub cum_regret: f64,
}

/// Discrete events worth logging unconditionally.
#[derive(Debug, Clone, Serialize)]
pub struct EventRow {
    pub seed: u64,
    pub policy: String,
    pub step: u64,
    pub event: &'static str,
    pub statistic: f64,
}

/// One policy's full record for one seed.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    pub policy: String,
    pub rows: Vec<StepRow>,
    pub events: Vec<EventRow>,
    pub final_regret: f64,
    pub time_avg_regret: f64,
    pub trajectory: Vec<(u64, f64)>,
    pub detections: Vec<u64>,
    pub changes: Vec<u64>,
    pub detection_stats: DetectionStats,
}

/// Aggregate over seeds for one policy.
#[derive(Debug, Clone, Serialize)]
pub struct PolicySummary {
    pub policy: String,
    pub seeds: u64,
    pub mean_final_regret: f64,
    pub mean_time_avg_regret: f64,
    pub var_time_avg_regret: f64,
    pub median_detection_delay: f64,
    pub miss_rate: f64,
    pub false_alarms_per_step: f64,
}

/// Everything a finished experiment hands back.
#[derive(Debug)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<PolicySummary>,
    /// Mean table used (wireless runs).
    pub mean_table: Option<MeanTable>,
}

/// Reproducibility manifest written next to the CSVs.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    pub files: Vec<String>,
    /// The resolved configuration, verbatim; a rerun parses this.
    pub config_toml: String,
}

fn build_policy(
    kind: &str,
    mapper: RewardMapper,
    baselines: &BaselineConfig,
    tscd_cfg: &TscdConfig,
    trace: &EnvTrace,
) -> Result<Box<dyn Policy>, HarnessError> {
    let wrap = |e: crate::policies::PolicyError| HarnessError::Config(e.to_string());
    Ok(match kind {
        "tscd" => Box::new(TscdPolicy::new(*tscd_cfg).map_err(wrap)?),
        "ts" => Box::new(ClassicalTs::new(mapper)),
        "dts" => Box::new(DiscountedTs::new(mapper, baselines.dts_discount).map_err(wrap)?),
        "ducb" => Box::new(
            DiscountedUcb::new(mapper, baselines.ducb_discount, baselines.ducb_xi).map_err(wrap)?,
        ),
        "swucb" => {
            Box::new(SlidingWindowUcb::new(mapper, baselines.sw_window, baselines.sw_xi).map_err(wrap)?)
        }
        "rexp3" => {
            Box::new(Rexp3::new(mapper, baselines.rexp3_batch, baselines.rexp3_gamma).map_err(wrap)?)
        }
        "phtucb" => Box::new(
            PhtUcb::new(mapper, baselines.pht_xi, baselines.pht_delta, baselines.pht_lambda)
                .map_err(wrap)?,
        ),
        "fixed" => Box::new(FixedPolicy::from_trace(trace)),
        "oracle" => Box::new(OraclePolicy::from_trace(trace)),
        other => return Err(HarnessError::Config(format!("unknown policy kind '{other}'"))),
    })
}

/// Drive one policy across one environment realization.
pub fn run_single(
    trace: &EnvTrace,
    policy: &mut dyn Policy,
    kind: &str,
    seed: u64,
    policy_stream: u64,
    log_interval: u64,
) -> RunRecord {
    let mut rewards_rng = streams::rng(seed, streams::REWARDS);
    let mut policy_rng = streams::rng(seed, policy_stream);
    let mut ledger = RegretLedger::new(log_interval);
    let mut cursor = trace.cursor();
    let mut rows = Vec::new();
    let mut events = Vec::new();
    let mut detections = Vec::new();

    let mut change_idx = 0usize;
    for step in 0..trace.horizon {
        let means = cursor.means_at(step);
        let is_change = change_idx < trace.schedule.len() && trace.schedule[change_idx] == step;
        if is_change {
            change_idx += 1;
            events.push(EventRow {
                seed,
                policy: kind.to_string(),
                step,
                event: "change",
                statistic: 0.0,
            });
        }
        let arm = policy.select(&mut policy_rng);
        let z: f64 = StandardNormal.sample(&mut rewards_rng);
        let raw = means[arm.index()] + trace.sigma * z;
        let outcome = policy.observe(arm, raw, &mut policy_rng);
        ledger.record_play(means, arm, step);

        if outcome.detection {
            detections.push(step);
            events.push(EventRow {
                seed,
                policy: kind.to_string(),
                step,
                event: "detection",
                statistic: outcome.verdict.map_or(0.0, |v| v.statistic),
            });
        } else if outcome.reset {
            events.push(EventRow {
                seed,
                policy: kind.to_string(),
                step,
                event: "reset",
                statistic: 0.0,
            });
        }

        let log_now = (log_interval > 0 && step % log_interval == 0)
            || is_change
            || outcome.detection
            || outcome.reset;
        if log_now {
            let phase = match (kind, outcome.verdict) {
                ("tscd", Some(_)) => "cd",
                ("tscd", None) => "ts",
                _ => "-",
            };
            rows.push(StepRow {
                seed,
                policy: kind.to_string(),
                step,
                arm: arm.index() as u8,
                raw_reward: raw,
                mapped_reward: outcome.mapped,
                mu0: means[0],
                mu1: means[1],
                phase,
                checked: outcome.verdict.is_some_and(|v| v.checked),
                detected: outcome.detection,
                statistic: outcome.verdict.map_or(0.0, |v| v.statistic),
                reset: outcome.reset,
                cum_regret: ledger.cumulative_regret,
            });
        }
    }

    let final_regret = ledger.cumulative_regret;
    let detection_stats = DetectionStats::classify(&trace.schedule, &detections, trace.horizon);
    RunRecord {
        seed,
        policy: kind.to_string(),
        rows,
        events,
        final_regret,
        time_avg_regret: final_regret / trace.horizon as f64,
        trajectory: ledger.trajectory,
        detections,
        changes: trace.schedule.clone(),
        detection_stats,
    }
}

/// Build the per-seed environment trace for a config.
pub fn build_trace(
    cfg: &ExperimentConfig,
    table: Option<&MeanTable>,
    seed: u64,
) -> Result<EnvTrace, HarnessError> {
    match cfg.environment.kind {
        EnvironmentKind::Synthetic => {
            EnvTrace::synthetic(&cfg.synthetic_spec(seed)).map_err(|e| HarnessError::Runtime(e.to_string()))
        }
        EnvironmentKind::Wireless => {
            let table = table.expect("wireless runs carry a mean table");
            let spec = crate::bandit::EnvironmentSpec {
                sigma: cfg.environment.sigma,
                delta_mu: table.delta_mu().max(1e-9),
                delta_m: table.delta_m().max(1e-9),
                lambda_c: cfg.environment.lambda_c,
                min_dwell: cfg.environment.min_dwell,
                mu_min: 0.0,
                mu_max: 1.0,
                horizon: cfg.experiment.horizon,
                seed,
            };
            let mut rng = streams::rng(seed, streams::SCHEDULE);
            let schedule = crate::bandit::generate_change_schedule(&spec, &mut rng);
            Ok(markov_trace(table, schedule, cfg.experiment.horizon, cfg.environment.sigma))
        }
    }
}

/// Resolve the wireless mean table for a config, when applicable.
pub fn resolve_mean_table(cfg: &ExperimentConfig) -> Result<Option<MeanTable>, HarnessError> {
    if cfg.environment.kind != EnvironmentKind::Wireless {
        return Ok(None);
    }
    let scenario = cfg.environment.scenario.clone().unwrap_or_else(WirelessScenario::default);
    let table = build_mean_table(&scenario, &ServingPathloss::default())
        .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    Ok(Some(table))
}

/// Run every configured policy over every seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let table = resolve_mean_table(cfg)?;
    let mapper = cfg.reward_mapper(table.as_ref())?;

    // Design inputs resolve against the realized environment quantities.
    let (delta_mu, delta_m) = match (&cfg.environment.kind, &table) {
        (EnvironmentKind::Wireless, Some(t)) => (t.delta_mu(), t.delta_m()),
        _ => (cfg.environment.delta_mu, cfg.environment.delta_m),
    };
    let inputs = cfg.theory.resolve(delta_mu, delta_m, cfg.environment.sigma, cfg.environment.lambda_c);
    let tscd_cfg = cfg.tscd.resolve(&inputs, mapper)?;

    let seeds: Vec<u64> =
        (cfg.experiment.seed_start..cfg.experiment.seed_start + cfg.experiment.n_seeds).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.experiment.workers)
        .build()
        .map_err(|e| HarnessError::Runtime(e.to_string()))?;

    let per_seed: Result<Vec<Vec<RunRecord>>, HarnessError> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let trace = build_trace(cfg, table.as_ref(), seed)?;
                let mut records = Vec::with_capacity(cfg.policies.len());
                for (idx, kind) in cfg.policies.iter().enumerate() {
                    let mut policy =
                        build_policy(kind, mapper, &cfg.baselines, &tscd_cfg, &trace)?;
                    let stream = streams::POLICY_BASE + idx as u64;
                    records.push(run_single(
                        &trace,
                        policy.as_mut(),
                        kind,
                        seed,
                        stream,
                        cfg.experiment.log_interval,
                    ));
                }
                Ok(records)
            })
            .collect()
    });
    let mut per_seed = per_seed?;
    per_seed.sort_by_key(|records| records.first().map_or(0, |r| r.seed));
    let records: Vec<RunRecord> = per_seed.into_iter().flatten().collect();

    let summaries = summarize(cfg, &records);
    Ok(ExperimentResult { records, summaries, mean_table: table })
}

fn summarize(cfg: &ExperimentConfig, records: &[RunRecord]) -> Vec<PolicySummary> {
    use super::metrics::mean_and_variance;
    cfg.policies
        .iter()
        .map(|kind| {
            let of_kind: Vec<&RunRecord> = records.iter().filter(|r| &r.policy == kind).collect();
            let finals: Vec<f64> = of_kind.iter().map(|r| r.final_regret).collect();
            let time_avgs: Vec<f64> = of_kind.iter().map(|r| r.time_avg_regret).collect();
            let (mean_final, _) = mean_and_variance(&finals);
            let (mean_ta, var_ta) = mean_and_variance(&time_avgs);
            let mut stats = DetectionStats::default();
            for r in &of_kind {
                stats.absorb(&r.detection_stats);
            }
            PolicySummary {
                policy: kind.clone(),
                seeds: of_kind.len() as u64,
                mean_final_regret: mean_final,
                mean_time_avg_regret: mean_ta,
                var_time_avg_regret: var_ta,
                median_detection_delay: stats.median_delay(),
                miss_rate: stats.miss_rate().0,
                false_alarms_per_step: stats.false_alarm_rate(),
            }
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Persist an experiment's outputs: trajectories, events, summary,
/// manifest. Returns the file list.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let traj_path = out_dir.join("trajectories.csv");
    {
        let mut w = csv::Writer::from_path(&traj_path)?;
        w.write_record([
            "seed",
            "policy",
            "step",
            "arm",
            "raw_reward",
            "mapped_reward",
            "mu0",
            "mu1",
            "phase",
            "checked",
            "detected",
            "statistic",
            "reset",
            "cum_regret",
            "time_avg_regret",
        ])?;
        for r in &result.records {
            for row in &r.rows {
                w.write_record([
                    row.seed.to_string(),
                    row.policy.clone(),
                    row.step.to_string(),
                    row.arm.to_string(),
                    row.raw_reward.to_string(),
                    fmt_opt(row.mapped_reward),
                    row.mu0.to_string(),
                    row.mu1.to_string(),
                    row.phase.to_string(),
                    row.checked.to_string(),
                    row.detected.to_string(),
                    row.statistic.to_string(),
                    row.reset.to_string(),
                    row.cum_regret.to_string(),
                    (row.cum_regret / (row.step + 1) as f64).to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    written.push(traj_path);

    let events_path = out_dir.join("events.csv");
    {
        let mut w = csv::Writer::from_path(&events_path)?;
        w.write_record(["seed", "policy", "step", "event", "statistic"])?;
        for r in &result.records {
            for e in &r.events {
                w.write_record([
                    e.seed.to_string(),
                    e.policy.clone(),
                    e.step.to_string(),
                    e.event.to_string(),
                    e.statistic.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    written.push(events_path);

    let summary_path = out_dir.join("summary.csv");
    {
        let mut w = csv::Writer::from_path(&summary_path)?;
        w.write_record([
            "seed",
            "policy",
            "final_regret",
            "time_avg_regret",
            "changes",
            "detections",
            "false_alarms",
            "misses",
            "median_delay",
        ])?;
        for r in &result.records {
            w.write_record([
                r.seed.to_string(),
                r.policy.clone(),
                r.final_regret.to_string(),
                r.time_avg_regret.to_string(),
                r.changes.len().to_string(),
                r.detections.len().to_string(),
                r.detection_stats.false_alarms.to_string(),
                r.detection_stats.misses.to_string(),
                r.detection_stats.median_delay().to_string(),
            ])?;
        }
        w.flush()?;
    }
    written.push(summary_path);

    let policy_summary_path = out_dir.join("policy_summary.csv");
    {
        let mut w = csv::Writer::from_path(&policy_summary_path)?;
        w.write_record([
            "policy",
            "seeds",
            "mean_final_regret",
            "mean_time_avg_regret",
            "var_time_avg_regret",
            "median_detection_delay",
            "miss_rate",
            "false_alarms_per_step",
        ])?;
        for s in &result.summaries {
            w.write_record([
                s.policy.clone(),
                s.seeds.to_string(),
                s.mean_final_regret.to_string(),
                s.mean_time_avg_regret.to_string(),
                s.var_time_avg_regret.to_string(),
                s.median_detection_delay.to_string(),
                s.miss_rate.to_string(),
                s.false_alarms_per_step.to_string(),
            ])?;
        }
        w.flush()?;
    }
    written.push(policy_summary_path);

    let config_toml = cfg.to_toml();
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hex::encode(Sha256::digest(config_toml.as_bytes())),
        seeds: (cfg.experiment.seed_start
            ..cfg.experiment.seed_start + cfg.experiment.n_seeds)
            .collect(),
        files: written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        config_toml,
    };
    let manifest_path = out_dir.join("manifest.json");
    let mut f = fs::File::create(&manifest_path)?;
    f.write_all(serde_json::to_string_pretty(&manifest).expect("manifest serializes").as_bytes())?;
    f.write_all(b"\n")?;
    written.push(manifest_path);

    Ok(written)
}

/// Run an experiment and persist everything under `out_dir`.
pub fn run_and_persist(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentResult, HarnessError> {
    let result = run_experiment(cfg)?;
    write_outputs(cfg, &result, out_dir)?;
    Ok(result)
}

/// Reproduce a persisted experiment from its manifest alone.
pub fn rerun_from_manifest(manifest_path: &Path, out_dir: &Path) -> Result<ExperimentResult, HarnessError> {
    let text = fs::read_to_string(manifest_path)?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("manifest: {e}")))?;
    let cfg = ExperimentConfig::from_toml(&manifest.config_toml)?;
    run_and_persist(&cfg, out_dir)
}
