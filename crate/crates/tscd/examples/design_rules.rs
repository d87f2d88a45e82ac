//! Evaluate the closed-form detector design chain over a budget grid.
//!
//! For each (p_loc, P_F, P_M) bundle this prints the stationary-phase
//! length (numeric root next to the printed closed form, which is
//! degenerate for most inputs), both test-window readings, the detection
//! threshold, the estimate-window length, the admissible change rate, and
//! the regret-bound success probability.
//!
//! ```bash
//! cargo run --release --example design_rules
//! ```

use tscd::theory::{compute_regret_bound, design_outputs, TheoryInputs};

fn main() {
    let base = TheoryInputs {
        delta_mu: 0.31,
        delta_m: 0.35,
        sigma: 0.1,
        epsilon: 0.01,
        epsilon_b: 0.01,
        p_loc: 0.01,
        p_change: 0.01,
        p_f: 1e-3,
        p_m: 1e-2,
        lambda_c: 5e-4,
    };

    println!(
        "{:>8} {:>8} {:>8} | {:>10} {:>10} {:>9} {:>9} {:>8} {:>6} {:>12} {:>7}",
        "p_loc", "P_F", "P_M", "T_N(num)", "T_N(form)", "n_T(papr)", "n_T(prf)", "delta_C",
        "N", "lambda_max", "p_tot"
    );
    for p_loc in [1e-4, 1e-2, 0.1] {
        for p_f in [1e-6, 1e-3, 1e-2] {
            for p_m in [1e-3, 1e-2] {
                let inputs = TheoryInputs { p_loc, p_f, p_m, ..base };
                match design_outputs(&inputs) {
                    Ok(out) => println!(
                        "{:>8.0e} {:>8.0e} {:>8.0e} | {:>10.1} {:>10} {:>9.2} {:>9.1} {:>8.4} {:>6} {:>12.3e} {:>7.4}",
                        p_loc,
                        p_f,
                        p_m,
                        out.t_n,
                        out.t_n_formula.map_or("-".to_string(), |v| format!("{v:.1}")),
                        out.n_t_paper,
                        out.n_t_proof,
                        out.delta_c,
                        out.est_window,
                        out.lambda_max,
                        out.p_tot,
                    ),
                    Err(e) => println!(
                        "{:>8.0e} {:>8.0e} {:>8.0e} | infeasible: {e}",
                        p_loc, p_f, p_m
                    ),
                }
            }
        }
    }

    // Regret bound across horizons for the base bundle.
    let out = design_outputs(&base).expect("base bundle is feasible");
    println!("\nregret bound at the base bundle (lambda = {}):", base.lambda_c);
    println!("{:>12} {:>16} {:>16}", "horizon", "bound", "time_avg_bound");
    let mut horizon = 1e3;
    while horizon <= 1e9 {
        let rb = compute_regret_bound(&base, out.t_n, out.n_t as f64, horizon).unwrap();
        println!("{:>12.0e} {:>16.6e} {:>16.6e}", horizon, rb.bound, rb.time_averaged);
        horizon *= 10.0;
    }
}
