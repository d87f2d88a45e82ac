//! Coverage probabilities of the wireless scenario: the four-entry mean
//! table, threshold sweeps, and a spot check against the point-process
//! simulator including the documented truncation estimate.
//!
//! ```bash
//! cargo run --release --example wireless_coverage
//! ```

use tscd::wireless::{
    build_mean_table, coverage_mc, coverage_mmwave, coverage_sub6, coverage_truncated,
    truncation_error_estimate, Rat, ServingPathloss, Visibility, WirelessScenario,
    TRUNCATION_FACTOR,
};

fn main() {
    let sc = WirelessScenario::default();
    let table = build_mean_table(&sc, &ServingPathloss::default()).expect("default scenario");

    println!("mean table (coverage probability = arm mean reward):");
    println!("{:<8} {:>10} {:>10} {:>14}", "rat", "LOS", "NLOS", "jump");
    for rat in Rat::BOTH {
        println!(
            "{:<8} {:>10.4} {:>10.4} {:>14.4}",
            format!("{rat:?}").to_lowercase(),
            table.mu[rat.index()][0],
            table.mu[rat.index()][1],
            table.jump(rat)
        );
    }
    println!(
        "inter-arm gaps: LOS {:.4}, NLOS {:.4}  (floor delta_mu = {:.4}, delta_m = {:.4})\n",
        table.gap(Visibility::Los),
        table.gap(Visibility::Nlos),
        table.delta_mu(),
        table.delta_m()
    );

    println!("coverage vs SINR threshold (serving at the median nearest AP):");
    println!("{:>8} {:>12} {:>12}", "gamma", "sub6_los", "mmwave_los");
    for i in 0..8 {
        let gamma = 0.05 * (2.0f64).powi(i);
        let swept = WirelessScenario { sinr_threshold: gamma, ..sc.clone() };
        let xs = table.serving[Rat::Sub6.index()][0];
        let xm = table.serving[Rat::MmWave.index()][0];
        println!(
            "{:>8.2} {:>12.4} {:>12.4}",
            gamma,
            coverage_sub6(&swept, Visibility::Los, xs).unwrap(),
            coverage_mmwave(&swept, Visibility::Los, xm).unwrap()
        );
    }

    let radius = TRUNCATION_FACTOR * sc.los_radius;
    let x = table.serving[Rat::Sub6.index()][0];
    let closed = coverage_truncated(&sc, Rat::Sub6, x, radius).unwrap();
    let trunc_err = truncation_error_estimate(&sc, Rat::Sub6, x, radius).unwrap();
    let mc = coverage_mc(&sc, Rat::Sub6, x, 40_000, 17);
    println!("\nsimulator spot check (sub6, LOS serving):");
    println!("  quadrature on the truncated network: {closed:.4}");
    println!("  point-process simulation:            {mc:.4}");
    println!("  closed-form truncation estimate:     {trunc_err:.4}");
}
