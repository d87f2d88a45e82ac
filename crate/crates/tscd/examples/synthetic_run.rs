//! One TS-CD run on a synthetic piecewise-stationary environment, with a
//! change/detection timeline.
//!
//! ```bash
//! cargo run --release --example synthetic_run
//! ```

use tscd::bandit::{streams, EnvTrace, EnvironmentSpec};
use tscd::changedetect::DetectorConfig;
use tscd::harness::run_single;
use tscd::policies::{RewardMapper, TscdConfig, TscdPolicy};

fn main() {
    let spec = EnvironmentSpec {
        sigma: 0.1,
        delta_mu: 0.3,
        delta_m: 0.3,
        lambda_c: 1e-3,
        min_dwell: 700,
        mu_min: 0.0,
        mu_max: 1.0,
        horizon: 50_000,
        seed: 7,
    };
    let trace = EnvTrace::synthetic(&spec).expect("valid spec");
    println!(
        "environment: {} changes over {} steps (min gap {:.3})",
        trace.schedule.len(),
        trace.horizon,
        trace.min_gap()
    );

    let mapper = RewardMapper::new(spec.mu_min, spec.mu_max, spec.sigma, 0.01).unwrap();
    let cfg = TscdConfig {
        t_n: 600,
        detector: DetectorConfig::new(5, 461, 0.24).unwrap(),
        mapper,
    };
    let mut policy = TscdPolicy::new(cfg).unwrap();
    let record =
        run_single(&trace, &mut policy, "tscd", spec.seed, streams::POLICY_BASE, 1000);

    println!("\ntimeline (c = change, d = detection):");
    let mut events: Vec<(u64, &str, f64)> = Vec::new();
    for e in &record.events {
        events.push((e.step, e.event, e.statistic));
    }
    events.sort_by_key(|e| e.0);
    for (step, kind, stat) in events.iter().take(40) {
        match *kind {
            "change" => println!("  c @ {step:>6}"),
            "detection" => println!("  d @ {step:>6}   statistic {stat:.3}"),
            other => println!("  {other} @ {step:>6}"),
        }
    }
    if events.len() > 40 {
        println!("  ... {} more events", events.len() - 40);
    }

    let stats = &record.detection_stats;
    println!("\nfinal regret:        {:.1}", record.final_regret);
    println!("time-avg regret:     {:.5}", record.time_avg_regret);
    println!("detections:          {}", record.detections.len());
    println!("false alarms:        {}", stats.false_alarms);
    println!("missed changes:      {} of {}", stats.misses, stats.changes);
    println!("median delay:        {} steps", stats.median_delay());
}
