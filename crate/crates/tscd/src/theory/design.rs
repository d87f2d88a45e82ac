//! Detector design rules: stationary-phase length, test-window size,
//! detection threshold, admissible change rate, and the regret bound.
//!
//! Two of the published closed forms are internally inconsistent with the
//! derivations behind them, so this module reports both readings:
//!
//! - `T_N`: the Lambert-W closed form is evaluated verbatim
//!   ([`TnSolution::formula`]) next to the bracketed-bisection root of the
//!   underlying play-count inequality ([`TnSolution::numeric`]). The numeric
//!   root is the value wired into detector defaults.
//! - `n_T`: the printed expression ([`NtSolution::paper`]) divides by the
//!   inter-arm gap and drops a square; the transcendental equation it came
//!   from solves exactly to [`NtSolution::proof`], which meets the stated
//!   false-alarm/miss budgets and is the value detectors use.

use serde::{Deserialize, Serialize};

use super::special::{lambert_w_minus1, q_inverse, regularized_upper_gamma};
use super::TheoryError;

/// Symbol bundle feeding every design rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryInputs {
    /// Minimum inter-arm mean gap Δ_μ (reward units).
    pub delta_mu: f64,
    /// Minimum per-arm jump magnitude Δ_m at a change (reward units).
    pub delta_m: f64,
    /// Reward standard deviation σ.
    pub sigma: f64,
    /// Well-localization tolerance ε for the mean estimate.
    pub epsilon: f64,
    /// Boundary tail probability ε_b used by the reward mapper.
    pub epsilon_b: f64,
    /// Budget for the estimate failing to be well-localized.
    pub p_loc: f64,
    /// Budget for changes arriving faster than the detector can track.
    pub p_change: f64,
    /// False-alarm probability budget P_F.
    pub p_f: f64,
    /// Missed-detection probability budget P_M.
    pub p_m: f64,
    /// Change arrival rate λ (per step). One field serves both the
    /// environment rate and the rate the regret bound is evaluated at.
    pub lambda_c: f64,
}

impl TheoryInputs {
    /// Check the invariants every design rule assumes.
    pub fn validate(&self) -> Result<(), TheoryError> {
        let probs = [
            ("epsilon_b", self.epsilon_b),
            ("p_loc", self.p_loc),
            ("p_change", self.p_change),
            ("p_f", self.p_f),
            ("p_m", self.p_m),
        ];
        for (name, p) in probs {
            if !(p > 0.0 && p < 1.0) {
                return Err(TheoryError::Domain(format!("{name} must be in (0,1), got {p}")));
            }
        }
        for (name, v) in [
            ("delta_mu", self.delta_mu),
            ("delta_m", self.delta_m),
            ("sigma", self.sigma),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0) {
                return Err(TheoryError::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.lambda_c < 0.0 {
            return Err(TheoryError::Domain(format!(
                "lambda_c must be >= 0, got {}",
                self.lambda_c
            )));
        }
        Ok(())
    }
}

/// The two readings of the stationary-phase length `T_N`.
#[derive(Debug, Clone)]
pub struct TnSolution {
    /// The printed Lambert-W closed form evaluated verbatim on the lower
    /// real branch; `None` when its argument leaves the branch domain,
    /// with the reason recorded.
    pub formula: Option<f64>,
    /// Why `formula` is absent, when it is.
    pub formula_note: Option<String>,
    /// The larger root of T − (40/Δ_μ²)·ln T = (1/ε)·ln(1/p_loc)
    /// + 48/Δ_μ⁴ + 18, found by bracketed bisection. This is the value
    /// detector defaults use.
    pub numeric: f64,
}

/// Left-hand side of the play-count inequality whose larger root is `T_N`.
pub fn t_n_lhs(t: f64, delta_mu: f64) -> f64 {
    t - 40.0 / (delta_mu * delta_mu) * t.ln()
}

/// Right-hand side of the play-count inequality.
pub fn t_n_rhs(inputs: &TheoryInputs) -> f64 {
    let d2 = inputs.delta_mu * inputs.delta_mu;
    (1.0 / inputs.epsilon) * (1.0 / inputs.p_loc).ln() + 48.0 / (d2 * d2) + 18.0
}

/// Minimum stationary-phase length `T_N`, both readings.
pub fn compute_t_n(inputs: &TheoryInputs) -> Result<TnSolution, TheoryError> {
    inputs.validate()?;
    let c = 40.0 / (inputs.delta_mu * inputs.delta_mu);
    let rhs = t_n_rhs(inputs);

    // Larger root of T − c·ln T = rhs. The function is increasing for
    // T > c, and g(max(c, rhs)) <= 0 < g(T) for T large enough.
    let g = |t: f64| t_n_lhs(t, inputs.delta_mu) - rhs;
    let mut lo = c.max(rhs).max(2.0);
    if g(lo) > 0.0 {
        // rhs so small the root sits between c and rhs; fall back to c.
        lo = c.max(2.0);
    }
    let mut hi = lo * 2.0;
    let mut expansions = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        expansions += 1;
        if hi > 1e18 || expansions > 80 {
            return Err(TheoryError::Infeasible(format!(
                "no stationary-phase root in (1, 1e18) for delta_mu={}, epsilon={}, p_loc={}",
                inputs.delta_mu, inputs.epsilon, inputs.p_loc
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-13 * hi {
            break;
        }
    }
    let numeric = 0.5 * (lo + hi);

    // Verbatim closed form: T_N = (−c)·W(−exp(−c·K)·(1/c)) with
    // K = (1/ε)·ln(1/p_loc) − 48/Δ_μ⁴, on the lower real branch.
    let d2 = inputs.delta_mu * inputs.delta_mu;
    let k_literal = (1.0 / inputs.epsilon) * (1.0 / inputs.p_loc).ln() - 48.0 / (d2 * d2);
    let exp_arg = -c * k_literal;
    let (formula, formula_note) = if exp_arg > 700.0 {
        (None, Some("closed-form argument overflows below the W branch cut".to_string()))
    } else {
        let z = -exp_arg.exp() / c;
        if z == 0.0 {
            (None, Some("closed-form argument underflows to zero; W_-1 diverges".to_string()))
        } else if z < -(-1.0_f64).exp() {
            (None, Some(format!("closed-form argument {z} lies below -1/e")))
        } else {
            match lambert_w_minus1(z) {
                Ok(w) => (Some(-c * w), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
    };

    Ok(TnSolution { formula, formula_note, numeric })
}

/// The two readings of the test-window size `n_T`.
#[derive(Debug, Clone, Copy)]
pub struct NtSolution {
    /// Printed expression: (1/Δ_μ)·(sqrt(ln(1/P_M)) + σ·Q⁻¹(P_F)).
    pub paper: f64,
    /// Exact solution of exp(−(Δ_m − σ·Q⁻¹(P_F)/sqrt(n_T))²·n_T) = P_M:
    /// n_T = ((sqrt(ln(1/P_M)) + σ·Q⁻¹(P_F)) / Δ_m)².
    pub proof: f64,
}

impl NtSolution {
    /// Integer window size for detector use (proof value, rounded up).
    pub fn proof_ceil(&self) -> u64 {
        (self.proof.ceil() as u64).max(1)
    }
}

/// Test-window size `n_T`, both readings.
pub fn compute_n_t(inputs: &TheoryInputs) -> Result<NtSolution, TheoryError> {
    inputs.validate()?;
    let qf = q_inverse(inputs.p_f)?;
    let sqrt_l = (1.0 / inputs.p_m).ln().sqrt();
    let core = sqrt_l + inputs.sigma * qf;
    if core <= 0.0 {
        return Err(TheoryError::Infeasible(format!(
            "sqrt(ln(1/p_m)) + sigma*Qinv(p_f) = {core} <= 0; the false-alarm quantile is \
             negative and dominates (p_f = {} >= 0.5), so no positive window exists",
            inputs.p_f
        )));
    }
    Ok(NtSolution {
        paper: core / inputs.delta_mu,
        proof: (core / inputs.delta_m) * (core / inputs.delta_m),
    })
}

/// Estimate-window length: the smallest N with N ≥ (1/ε)·ln(1/p_loc).
pub fn compute_est_window(inputs: &TheoryInputs) -> u64 {
    (((1.0 / inputs.epsilon) * (1.0 / inputs.p_loc).ln()).ceil() as u64).max(1)
}

/// Detection threshold Δ_C = σ·Q⁻¹(P_F)/sqrt(n_T) − ε.
///
/// A non-positive result means the localization tolerance swallows the
/// false-alarm quantile; the detector constructor rejects such thresholds.
pub fn compute_delta_c(inputs: &TheoryInputs, n_t: f64) -> Result<f64, TheoryError> {
    inputs.validate()?;
    if n_t < 1.0 {
        return Err(TheoryError::Domain(format!("n_t must be >= 1, got {n_t}")));
    }
    let qf = q_inverse(inputs.p_f)?;
    Ok(inputs.sigma * qf / n_t.sqrt() - inputs.epsilon)
}

/// Admissible change-rate bound: λ ≤ ln(1/(1−p_change)) / (n_T + T_N).
pub fn compute_lambda_bound(inputs: &TheoryInputs, t_n: f64, n_t: f64) -> Result<f64, TheoryError> {
    inputs.validate()?;
    if t_n + n_t <= 0.0 {
        return Err(TheoryError::Domain(format!(
            "t_n + n_t must be > 0, got {t_n} + {n_t}"
        )));
    }
    Ok((1.0 / (1.0 - inputs.p_change)).ln() / (t_n + n_t))
}

/// Expected-regret bound evaluation.
#[derive(Debug, Clone, Copy)]
pub struct RegretBound {
    /// ln(T_N)·λ·T·Γ(T/(T_N+n_T), λT)/Γ(T/(T_N+n_T)), big-O constant 1.
    pub bound: f64,
    /// `bound / T`.
    pub time_averaged: f64,
    /// Probability the bound applies: (1−p_loc)(1−p_change)(1−P_M).
    pub p_tot: f64,
}

/// Regret bound at horizon `t`, using `inputs.lambda_c` as the change rate.
pub fn compute_regret_bound(
    inputs: &TheoryInputs,
    t_n: f64,
    n_t: f64,
    horizon: f64,
) -> Result<RegretBound, TheoryError> {
    inputs.validate()?;
    if horizon < 1.0 {
        return Err(TheoryError::Domain(format!("horizon must be >= 1, got {horizon}")));
    }
    let p_tot = (1.0 - inputs.p_loc) * (1.0 - inputs.p_change) * (1.0 - inputs.p_m);
    let lambda = inputs.lambda_c;
    if lambda == 0.0 {
        return Ok(RegretBound { bound: 0.0, time_averaged: 0.0, p_tot });
    }
    let shape = horizon / (t_n + n_t);
    let gamma_ratio = regularized_upper_gamma(shape, lambda * horizon)?;
    let bound = t_n.ln() * lambda * horizon * gamma_ratio;
    Ok(RegretBound { bound, time_averaged: bound / horizon, p_tot })
}

/// All design outputs for one input bundle.
#[derive(Debug, Clone)]
pub struct DesignOutputs {
    /// Stationary-phase length (numeric root; the wired-in default).
    pub t_n: f64,
    /// Printed closed-form T_N, when its W argument is in-domain.
    pub t_n_formula: Option<f64>,
    /// Printed test-window expression.
    pub n_t_paper: f64,
    /// Proof-derived test-window size.
    pub n_t_proof: f64,
    /// Integer test window for detectors (ceil of the proof value).
    pub n_t: u64,
    /// Estimate-window length N.
    pub est_window: u64,
    /// Detection threshold at the integer window size.
    pub delta_c: f64,
    /// Admissible change-rate bound.
    pub lambda_max: f64,
    /// Success probability of the regret bound.
    pub p_tot: f64,
}

/// Evaluate the full design chain for one input bundle.
pub fn design_outputs(inputs: &TheoryInputs) -> Result<DesignOutputs, TheoryError> {
    let tn = compute_t_n(inputs)?;
    let nt = compute_n_t(inputs)?;
    let n_t_int = nt.proof_ceil();
    let delta_c = compute_delta_c(inputs, n_t_int as f64)?;
    let lambda_max = compute_lambda_bound(inputs, tn.numeric, n_t_int as f64)?;
    let p_tot = (1.0 - inputs.p_loc) * (1.0 - inputs.p_change) * (1.0 - inputs.p_m);
    Ok(DesignOutputs {
        t_n: tn.numeric,
        t_n_formula: tn.formula,
        n_t_paper: nt.paper,
        n_t_proof: nt.proof,
        n_t: n_t_int,
        est_window: compute_est_window(inputs),
        delta_c,
        lambda_max,
        p_tot,
    })
}
