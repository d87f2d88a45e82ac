//! Small grid search for baseline parameters.
//!
//! Runs each candidate over a handful of paired seeds on a tuning config
//! and ranks by mean final regret. Ties are broken by the one-standard-
//! error rule: among candidates within one standard error of the best,
//! prefer the most conservative (largest window/batch/threshold, discount
//! closest to one), which favors stable configurations over ones that won
//! by seed luck.

use super::config::ExperimentConfig;
use super::runner::run_experiment;
use super::HarnessError;
use crate::policies::BaselineConfig;

/// One evaluated candidate.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub policy: &'static str,
    pub description: String,
    pub mean_regret: f64,
    pub std_error: f64,
    /// Conservativeness rank within its grid (higher = more conservative).
    pub stability_rank: usize,
}

fn evaluate(
    cfg: &ExperimentConfig,
    policy: &'static str,
    baselines: BaselineConfig,
) -> Result<(f64, f64), HarnessError> {
    let mut cfg = cfg.clone();
    cfg.policies = vec![policy.to_string()];
    cfg.baselines = baselines;
    cfg.experiment.log_interval = 0;
    let result = run_experiment(&cfg)?;
    let finals: Vec<f64> = result.records.iter().map(|r| r.final_regret).collect();
    let (mean, var) = super::metrics::mean_and_variance(&finals);
    Ok((mean, (var / finals.len() as f64).sqrt()))
}

fn pick(outcomes: &[TuneOutcome]) -> TuneOutcome {
    let best = outcomes
        .iter()
        .min_by(|a, b| a.mean_regret.partial_cmp(&b.mean_regret).unwrap())
        .expect("non-empty grid");
    let threshold = best.mean_regret + best.std_error;
    outcomes
        .iter()
        .filter(|o| o.mean_regret <= threshold)
        .max_by_key(|o| o.stability_rank)
        .expect("at least the best qualifies")
        .clone()
}

/// Grid-search all baselines on the given tuning config; returns the
/// chosen candidate per policy, in a stable order.
pub fn grid_search_baselines(tuning_cfg: &ExperimentConfig) -> Result<Vec<TuneOutcome>, HarnessError> {
    let mut chosen = Vec::new();

    // D-UCB: discount x exploration coefficient.
    let mut outcomes = Vec::new();
    for (rank_g, &g) in [0.98, 0.99, 0.995, 0.998].iter().enumerate() {
        for (rank_x, &xi) in [0.1, 0.3, 0.6].iter().enumerate() {
            let b = BaselineConfig { ducb_discount: g, ducb_xi: xi, ..Default::default() };
            let (mean, se) = evaluate(tuning_cfg, "ducb", b)?;
            outcomes.push(TuneOutcome {
                policy: "ducb",
                description: format!("discount={g}, xi={xi}"),
                mean_regret: mean,
                std_error: se,
                stability_rank: rank_g * 10 + rank_x,
            });
        }
    }
    chosen.push(pick(&outcomes));

    // SW-UCB: window x exploration coefficient.
    let mut outcomes = Vec::new();
    for (rank_w, &w) in [200usize, 400, 800, 1600].iter().enumerate() {
        for (rank_x, &xi) in [0.1, 0.3, 0.6].iter().enumerate() {
            let b = BaselineConfig { sw_window: w, sw_xi: xi, ..Default::default() };
            let (mean, se) = evaluate(tuning_cfg, "swucb", b)?;
            outcomes.push(TuneOutcome {
                policy: "swucb",
                description: format!("window={w}, xi={xi}"),
                mean_regret: mean,
                std_error: se,
                stability_rank: rank_w * 10 + rank_x,
            });
        }
    }
    chosen.push(pick(&outcomes));

    // Discounted TS.
    let mut outcomes = Vec::new();
    for (rank, &g) in [0.95, 0.98, 0.99, 0.995, 0.999].iter().enumerate() {
        let b = BaselineConfig { dts_discount: g, ..Default::default() };
        let (mean, se) = evaluate(tuning_cfg, "dts", b)?;
        outcomes.push(TuneOutcome {
            policy: "dts",
            description: format!("discount={g}"),
            mean_regret: mean,
            std_error: se,
            stability_rank: rank,
        });
    }
    chosen.push(pick(&outcomes));

    // REXP3: batch x exploration rate.
    let mut outcomes = Vec::new();
    for (rank_b, &batch) in [1000u64, 2000, 4000].iter().enumerate() {
        for (rank_g, &g) in [0.05, 0.1, 0.15, 0.3].iter().enumerate() {
            let b = BaselineConfig { rexp3_batch: batch, rexp3_gamma: g, ..Default::default() };
            let (mean, se) = evaluate(tuning_cfg, "rexp3", b)?;
            outcomes.push(TuneOutcome {
                policy: "rexp3",
                description: format!("batch={batch}, gamma={g}"),
                mean_regret: mean,
                std_error: se,
                stability_rank: rank_b * 10 + rank_g,
            });
        }
    }
    chosen.push(pick(&outcomes));

    // PHT-UCB: drift tolerance x alarm threshold x exploration.
    let mut outcomes = Vec::new();
    for (rank_d, &delta) in [0.005, 0.02].iter().enumerate() {
        for (rank_l, &lambda) in [0.5, 1.0, 2.0, 4.0, 8.0].iter().enumerate() {
            for (rank_x, &xi) in [0.1, 0.3].iter().enumerate() {
                let b = BaselineConfig {
                    pht_delta: delta,
                    pht_lambda: lambda,
                    pht_xi: xi,
                    ..Default::default()
                };
                let (mean, se) = evaluate(tuning_cfg, "phtucb", b)?;
                outcomes.push(TuneOutcome {
                    policy: "phtucb",
                    description: format!("delta={delta}, lambda={lambda}, xi={xi}"),
                    mean_regret: mean,
                    std_error: se,
                    stability_rank: rank_l * 100 + rank_d * 10 + rank_x,
                });
            }
        }
    }
    chosen.push(pick(&outcomes));

    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_standard_error_rule_prefers_conservative_ties() {
        let outcomes = vec![
            TuneOutcome {
                policy: "x",
                description: "aggressive".into(),
                mean_regret: 100.0,
                std_error: 10.0,
                stability_rank: 0,
            },
            TuneOutcome {
                policy: "x",
                description: "conservative".into(),
                mean_regret: 105.0,
                std_error: 10.0,
                stability_rank: 5,
            },
            TuneOutcome {
                policy: "x",
                description: "bad".into(),
                mean_regret: 200.0,
                std_error: 10.0,
                stability_rank: 9,
            },
        ];
        assert_eq!(pick(&outcomes).description, "conservative");
    }
}
