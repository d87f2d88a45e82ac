//! Desk-scale policy comparison on the wireless RAT-selection environment:
//! every policy sees identical change schedules and reward noise per seed.
//!
//! ```bash
//! cargo run --release --example policy_comparison
//! ```

use tscd::harness::{run_experiment, ExperimentConfig};

fn main() {
    let mut cfg = ExperimentConfig::default_wireless_comparison();
    cfg.experiment.horizon = 30_000;
    cfg.experiment.n_seeds = 10;
    cfg.experiment.log_interval = 0;
    cfg.policies.insert(2, "swucb".into());
    cfg.policies.insert(2, "ts".into());

    let result = run_experiment(&cfg).expect("experiment runs");
    if let Some(table) = &result.mean_table {
        println!(
            "mean table: sub6 (LOS {:.3}, NLOS {:.3}) | mmwave (LOS {:.3}, NLOS {:.3})",
            table.mu[0][0], table.mu[0][1], table.mu[1][0], table.mu[1][1]
        );
        println!(
            "gap floor {:.3}, jump floor {:.3}\n",
            table.delta_mu(),
            table.delta_m()
        );
    }
    println!(
        "{:<8} {:>12} {:>14} {:>13} {:>10} {:>10}",
        "policy", "mean_regret", "mean_time_avg", "var_time_avg", "med_delay", "miss_rate"
    );
    for s in &result.summaries {
        println!(
            "{:<8} {:>12.1} {:>14.6} {:>13.3e} {:>10} {:>10.4}",
            s.policy,
            s.mean_final_regret,
            s.mean_time_avg_regret,
            s.var_time_avg_regret,
            if s.median_detection_delay.is_nan() {
                "-".to_string()
            } else {
                format!("{:.1}", s.median_detection_delay)
            },
            s.miss_rate
        );
    }
    println!("\n(policies without a detector never raise detections; their");
    println!(" miss rate reads 1.0 and their delay column is empty)");
}
