//! Grid-search the baseline policy parameters on a reduced tuning
//! configuration and print the pick per policy.
//!
//! The shipped `BaselineConfig::default()` values came from this search at
//! horizon 3e4 with 5 paired seeds; this example uses a smaller budget so
//! it finishes quickly, so expect picks to wobble within the flat region
//! of each grid.
//!
//! ```bash
//! cargo run --release --example baseline_tuning
//! ```

use tscd::harness::{grid_search_baselines, ExperimentConfig};

fn main() {
    let mut cfg = ExperimentConfig::default_wireless_comparison();
    cfg.experiment.horizon = 10_000;
    cfg.experiment.n_seeds = 3;
    cfg.experiment.log_interval = 0;

    println!("tuning on: horizon {}, {} seeds", cfg.experiment.horizon, cfg.experiment.n_seeds);
    let picks = grid_search_baselines(&cfg).expect("grid search runs");
    println!(
        "\n{:<8} {:<34} {:>12} {:>8}",
        "policy", "chosen parameters", "mean_regret", "se"
    );
    for p in &picks {
        println!(
            "{:<8} {:<34} {:>12.1} {:>8.1}",
            p.policy, p.description, p.mean_regret, p.std_error
        );
    }
    println!("\nselection: best mean regret, ties broken within one standard");
    println!("error toward the more conservative setting.");
}
