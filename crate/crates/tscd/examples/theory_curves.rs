//! Emit the four design-curve CSV files (stationary-phase length,
//! test-window size, admissible change rate, regret bound) into
//! `out/theory/`. Equivalent to `tscd theory --out out/theory`.
//!
//! ```bash
//! cargo run --release --example theory_curves
//! ```

use std::path::Path;

use tscd::harness::emit_theory_curves;
use tscd::theory::TheoryInputs;

fn main() {
    let inputs = TheoryInputs {
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
    let out = Path::new("out/theory");
    let files = emit_theory_curves(&inputs, out).expect("curves emit");
    for f in &files {
        println!("wrote {}", f.display());
    }
    println!("\ncolumns carry every swept parameter; infeasible grid points");
    println!("appear as NaN rows with a reason column.");
}
