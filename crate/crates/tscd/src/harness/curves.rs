//! Design-curve emission: four CSV files sweeping the closed-form rules.
//!
//! Infeasible grid points are kept as explicit NaN rows with a reason
//! column rather than dropped, so downstream plots show the holes.

use std::fs;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::theory::{
    compute_lambda_bound, compute_n_t, compute_regret_bound, compute_t_n, TheoryInputs,
};

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (lln, hln) = (lo.ln(), hi.ln());
    (0..n).map(|i| (lln + (hln - lln) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Emit all four curve files under `out_dir`; returns the paths written.
pub fn emit_theory_curves(base: &TheoryInputs, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    base.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    // (a) Stationary-phase length vs localization budget.
    let path = out_dir.join("tn_vs_ploc.csv");
    {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["p_loc", "delta_mu", "epsilon", "t_n_numeric", "t_n_formula", "reason"])?;
        for &delta_mu in &[0.2, 0.3, 0.5] {
            for &epsilon in &[0.005, 0.01, 0.05] {
                for &p_loc in &logspace(1e-4, 0.3, 25) {
                    let inputs = TheoryInputs { delta_mu, epsilon, p_loc, ..*base };
                    match compute_t_n(&inputs) {
                        Ok(sol) => w.write_record([
                            p_loc.to_string(),
                            delta_mu.to_string(),
                            epsilon.to_string(),
                            sol.numeric.to_string(),
                            sol.formula.map_or("NaN".into(), |v| v.to_string()),
                            sol.formula_note.unwrap_or_default(),
                        ])?,
                        Err(e) => w.write_record([
                            p_loc.to_string(),
                            delta_mu.to_string(),
                            epsilon.to_string(),
                            "NaN".into(),
                            "NaN".into(),
                            e.to_string(),
                        ])?,
                    }
                }
            }
        }
        w.flush()?;
    }
    written.push(path);

    // (b) Test-window size vs miss budget.
    let path = out_dir.join("nt_vs_pm.csv");
    {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["p_m", "p_f", "delta_m", "sigma", "n_t_paper", "n_t_proof", "reason"])?;
        for &p_f in &[1e-4, 1e-2] {
            for &delta_m in &[0.2, 0.35] {
                for &sigma in &[0.05, 0.1, 0.2] {
                    for &p_m in &logspace(1e-6, 0.3, 25) {
                        let inputs = TheoryInputs { p_f, delta_m, sigma, p_m, ..*base };
                        match compute_n_t(&inputs) {
                            Ok(nt) => w.write_record([
                                p_m.to_string(),
                                p_f.to_string(),
                                delta_m.to_string(),
                                sigma.to_string(),
                                nt.paper.to_string(),
                                nt.proof.to_string(),
                                String::new(),
                            ])?,
                            Err(e) => w.write_record([
                                p_m.to_string(),
                                p_f.to_string(),
                                delta_m.to_string(),
                                sigma.to_string(),
                                "NaN".into(),
                                "NaN".into(),
                                e.to_string(),
                            ])?,
                        }
                    }
                }
            }
        }
        w.flush()?;
    }
    written.push(path);

    // (c) Admissible change rate vs change budget.
    let path = out_dir.join("lambda_vs_pchange.csv");
    {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["p_change", "p_loc", "t_n", "n_t", "lambda_max", "reason"])?;
        for &p_loc in &[1e-3, 1e-2, 0.1] {
            for &p_change in &logspace(1e-4, 0.5, 25) {
                let inputs = TheoryInputs { p_loc, p_change, ..*base };
                let row = compute_t_n(&inputs).and_then(|tn| {
                    let nt = compute_n_t(&inputs)?;
                    let lb =
                        compute_lambda_bound(&inputs, tn.numeric, nt.proof_ceil() as f64)?;
                    Ok((tn.numeric, nt.proof_ceil(), lb))
                });
                match row {
                    Ok((t_n, n_t, lambda_max)) => w.write_record([
                        p_change.to_string(),
                        p_loc.to_string(),
                        t_n.to_string(),
                        n_t.to_string(),
                        lambda_max.to_string(),
                        String::new(),
                    ])?,
                    Err(e) => w.write_record([
                        p_change.to_string(),
                        p_loc.to_string(),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        e.to_string(),
                    ])?,
                }
            }
        }
        w.flush()?;
    }
    written.push(path);

    // (d) Time-averaged regret bound vs horizon, one curve per budget.
    let path = out_dir.join("regret_bound_vs_t.csv");
    {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "horizon",
            "budget",
            "lambda",
            "t_n",
            "n_t",
            "bound",
            "time_avg_bound",
            "p_tot",
            "reason",
        ])?;
        for &budget in &[1e-4, 1e-3, 1e-2] {
            let inputs = TheoryInputs { p_loc: budget, p_change: budget, p_m: budget, ..*base };
            let design = compute_t_n(&inputs).and_then(|tn| {
                let nt = compute_n_t(&inputs)?;
                Ok((tn.numeric, nt.proof_ceil() as f64))
            });
            for &horizon in &logspace(1e2, 1e9, 29) {
                match &design {
                    Ok((t_n, n_t)) => {
                        match compute_regret_bound(&inputs, *t_n, *n_t, horizon) {
                            Ok(rb) => w.write_record([
                                horizon.to_string(),
                                budget.to_string(),
                                inputs.lambda_c.to_string(),
                                t_n.to_string(),
                                n_t.to_string(),
                                rb.bound.to_string(),
                                rb.time_averaged.to_string(),
                                rb.p_tot.to_string(),
                                String::new(),
                            ])?,
                            Err(e) => w.write_record([
                                horizon.to_string(),
                                budget.to_string(),
                                inputs.lambda_c.to_string(),
                                t_n.to_string(),
                                n_t.to_string(),
                                "NaN".into(),
                                "NaN".into(),
                                "NaN".into(),
                                e.to_string(),
                            ])?,
                        }
                    }
                    Err(e) => w.write_record([
                        horizon.to_string(),
                        budget.to_string(),
                        inputs.lambda_c.to_string(),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        e.to_string(),
                    ])?,
                }
            }
        }
        w.flush()?;
    }
    written.push(path);

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> TheoryInputs {
        TheoryInputs {
            delta_mu: 0.3,
            delta_m: 0.3,
            sigma: 0.1,
            epsilon: 0.01,
            epsilon_b: 0.01,
            p_loc: 0.01,
            p_change: 0.01,
            p_f: 1e-3,
            p_m: 1e-2,
            lambda_c: 5e-4,
        }
    }

    #[test]
    fn all_four_files_appear_with_headers() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_theory_curves(&base(), dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        for f in &files {
            let text = fs::read_to_string(f).unwrap();
            let mut lines = text.lines();
            let header = lines.next().unwrap();
            assert!(header.split(',').count() >= 5, "{f:?} header: {header}");
            assert!(lines.count() > 10, "{f:?} has too few rows");
        }
    }

    #[test]
    fn lambda_curve_rows_match_direct_evaluation() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_theory_curves(&base(), dir.path()).unwrap();
        let text = fs::read_to_string(&files[2]).unwrap();
        let mut checked = 0;
        for line in text.lines().skip(1).take(8) {
            let cols: Vec<&str> = line.split(',').collect();
            let p_change: f64 = cols[0].parse().unwrap();
            let p_loc: f64 = cols[1].parse().unwrap();
            let t_n: f64 = cols[2].parse().unwrap();
            let n_t: f64 = cols[3].parse().unwrap();
            let lambda_max: f64 = cols[4].parse().unwrap();
            let inputs = TheoryInputs { p_loc, p_change, ..base() };
            let direct = compute_lambda_bound(&inputs, t_n, n_t).unwrap();
            assert!((direct - lambda_max).abs() <= 1e-12 * direct.max(1e-300));
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn curve_grids_respect_monotonicity_directions() {
        // The per-curve monotonicity spot checks live in the acceptance
        // suite; here just confirm est-window stays sane over the grid.
        for &p_loc in &[1e-3, 1e-2, 0.1] {
            let n = crate::theory::compute_est_window(&TheoryInputs { p_loc, ..base() });
            assert!(n >= 1);
        }
    }
}
