//! Thin CLI over the library: batch runs, design curves, coverage tables,
//! and Monte Carlo validation. Exit codes: 0 success, 1 config error,
//! 2 runtime error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tscd::harness::{self, ExperimentConfig, HarnessError};
use tscd::wireless::{
    build_mean_table, coverage_mc, coverage_truncated, intensity_count_mc, pathloss_intensity,
    truncation_error_estimate, Rat, ServingPathloss, Visibility, TRUNCATION_FACTOR,
};

#[derive(Parser)]
#[command(name = "tscd", version, about = "Non-stationary bandit experiments with TS-CD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch experiment and persist CSV outputs plus a manifest.
    Run(RunArgs),
    /// Emit the design-rule curve CSVs.
    Theory(TheoryArgs),
    /// Evaluate the wireless coverage mean table.
    Coverage(CoverageArgs),
    /// Validate closed forms against the Monte Carlo point-process oracle.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML); defaults to the wireless comparison.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reproduce a previous run from its manifest instead of a config.
    #[arg(long, conflicts_with = "config")]
    from_manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the number of seeds.
    #[arg(long)]
    seeds: Option<u64>,
    /// Override the first seed.
    #[arg(long)]
    seed_start: Option<u64>,
    /// Override the worker-thread count (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Experiment config supplying the `[theory]` inputs.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CoverageArgs {
    /// Experiment config supplying the scenario (defaults otherwise).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Experiment config supplying the scenario (defaults otherwise).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Monte Carlo trials per coverage grid point.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Point-process realizations for the intensity check.
    #[arg(long, default_value_t = 3_000)]
    realizations: u64,
}

fn load_config(path: &Option<PathBuf>) -> Result<ExperimentConfig, HarnessError> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            ExperimentConfig::from_toml(&text)
        }
        None => Ok(ExperimentConfig::default_wireless_comparison()),
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), HarnessError> {
    if let Some(manifest) = &args.from_manifest {
        let result = harness::rerun_from_manifest(manifest, &args.out)?;
        println!("reproduced {} records into {}", result.records.len(), args.out.display());
        return Ok(());
    }
    let mut cfg = load_config(&args.config)?;
    if let Some(n) = args.seeds {
        cfg.experiment.n_seeds = n;
    }
    if let Some(s) = args.seed_start {
        cfg.experiment.seed_start = s;
    }
    if let Some(w) = args.workers {
        cfg.experiment.workers = w;
    }
    cfg.validate()?;
    let result = harness::run_and_persist(&cfg, &args.out)?;
    println!(
        "{:<8} {:>14} {:>14} {:>12} {:>10} {:>10}",
        "policy", "mean_regret", "mean_time_avg", "var_time_avg", "med_delay", "miss_rate"
    );
    for s in &result.summaries {
        println!(
            "{:<8} {:>14.2} {:>14.6} {:>12.3e} {:>10.1} {:>10.4}",
            s.policy,
            s.mean_final_regret,
            s.mean_time_avg_regret,
            s.var_time_avg_regret,
            s.median_detection_delay,
            s.miss_rate
        );
    }
    println!("outputs in {}", args.out.display());
    Ok(())
}

fn cmd_theory(args: &TheoryArgs) -> Result<(), HarnessError> {
    let cfg = load_config(&args.config)?;
    // Curves take the design point from the config's environment.
    let table = harness::resolve_mean_table(&cfg)?;
    let (delta_mu, delta_m) = match &table {
        Some(t) => (t.delta_mu(), t.delta_m()),
        None => (cfg.environment.delta_mu, cfg.environment.delta_m),
    };
    let inputs =
        cfg.theory.resolve(delta_mu, delta_m, cfg.environment.sigma, cfg.environment.lambda_c);
    let files = harness::emit_theory_curves(&inputs, &args.out)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_coverage(args: &CoverageArgs) -> Result<(), HarnessError> {
    let cfg = load_config(&args.config)?;
    let scenario = cfg.environment.scenario.clone().unwrap_or_default();
    let table = build_mean_table(&scenario, &ServingPathloss::default())
        .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    fs::create_dir_all(&args.out)?;
    let path = args.out.join("mean_table.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["rat", "visibility", "serving_pathloss", "coverage"])?;
    for rat in Rat::BOTH {
        for vis in Visibility::BOTH {
            w.write_record([
                format!("{rat:?}").to_lowercase(),
                format!("{vis:?}").to_lowercase(),
                table.serving[rat.index()][vis.index()].to_string(),
                table.mu[rat.index()][vis.index()].to_string(),
            ])?;
        }
    }
    w.flush()?;
    println!("wrote {}", path.display());
    println!(
        "gaps: los={:.4} nlos={:.4} (delta_mu={:.4}); jumps: sub6={:.4} mmwave={:.4} (delta_m={:.4})",
        table.gap(Visibility::Los),
        table.gap(Visibility::Nlos),
        table.delta_mu(),
        table.jump(Rat::Sub6),
        table.jump(Rat::MmWave),
        table.delta_m()
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), HarnessError> {
    let cfg = load_config(&args.config)?;
    let scenario = cfg.environment.scenario.clone().unwrap_or_default();
    scenario.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut failures = 0u32;

    // The simulator realizes the network out to 50 LOS-ball radii; the
    // quadrature is evaluated on the same truncated domain, next to the
    // closed-form estimate of what the truncation omits.
    let radius = TRUNCATION_FACTOR * scenario.los_radius;
    println!("coverage: quadrature vs Monte Carlo ({} trials)", args.trials);
    println!(
        "{:<8} {:<6} {:>10} {:>12} {:>12} {:>10} {:>10}",
        "rat", "vis", "serving_x", "quadrature", "monte_carlo", "abs_diff", "trunc_est"
    );
    let mut seed = 100u64;
    for rat in Rat::BOTH {
        for vis in Visibility::BOTH {
            for dist_scale in [0.7, 1.0, 1.4] {
                let r = dist_scale
                    * ((2.0f64).ln() / (std::f64::consts::PI * scenario.ap_density)).sqrt();
                let x = scenario.rat(rat).pathloss_at(r, vis);
                let closed = coverage_truncated(&scenario, rat, x, radius)
                    .map_err(|e| HarnessError::Runtime(e.to_string()))?;
                let trunc_est = truncation_error_estimate(&scenario, rat, x, radius)
                    .map_err(|e| HarnessError::Runtime(e.to_string()))?;
                let mc = coverage_mc(&scenario, rat, x, args.trials, seed);
                seed += 1;
                let diff = (closed - mc).abs();
                if diff > 0.01 {
                    failures += 1;
                }
                println!(
                    "{:<8} {:<6} {:>10.4e} {:>12.6} {:>12.6} {:>10.6} {:>10.6}",
                    format!("{rat:?}").to_lowercase(),
                    format!("{vis:?}").to_lowercase(),
                    x,
                    closed,
                    mc,
                    diff,
                    trunc_est
                );
            }
        }
    }

    println!("\nintensity: closed form vs point counts ({} realizations)", args.realizations);
    for rat in Rat::BOTH {
        for vis in Visibility::BOTH {
            let params = scenario.rat(rat);
            let boundary = scenario.los_radius.powf(params.exponent(vis)) / params.kp();
            let grid: Vec<f64> = match vis {
                Visibility::Los => (1..=3).map(|i| boundary * i as f64 / 3.0).collect(),
                Visibility::Nlos => (1..=3).map(|i| boundary * (1 + i) as f64).collect(),
            };
            let counts = intensity_count_mc(&scenario, rat, vis, &grid, args.realizations, seed);
            seed += 1;
            for (i, &(mean, se)) in counts.iter().enumerate() {
                let expect = pathloss_intensity(&scenario, rat, vis, grid[i]);
                let ok = (mean - expect).abs() <= 3.0 * se.max(1e-9);
                if !ok {
                    failures += 1;
                }
                println!(
                    "{:<8} {:<6} t={:<12.4e} count={:<10.4} expected={:<10.4} se={:<8.4} {}",
                    format!("{rat:?}").to_lowercase(),
                    format!("{vis:?}").to_lowercase(),
                    grid[i],
                    mean,
                    expect,
                    se,
                    if ok { "ok" } else { "MISMATCH" }
                );
            }
        }
    }

    if failures > 0 {
        return Err(HarnessError::Runtime(format!("{failures} oracle comparisons failed")));
    }
    println!("\nall oracle comparisons within tolerance");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
