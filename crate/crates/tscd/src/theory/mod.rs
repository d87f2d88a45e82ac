//! Closed-form detector design rules and the special functions behind them.
//!
//! [`special`] provides the Gaussian tail function Q and its inverse, the
//! Lambert-W function (both real branches), and the regularized incomplete
//! gamma functions. [`design`] evaluates the design quantities built from
//! them: the stationary-phase length `T_N`, the test-window size `n_T`, the
//! detection threshold `Δ_C`, the admissible change-rate bound, and the
//! expected-regret bound with its success probability.

pub mod design;
pub mod special;

pub use design::{
    compute_delta_c, compute_est_window, compute_lambda_bound, compute_n_t, compute_regret_bound,
    compute_t_n, design_outputs, DesignOutputs, NtSolution, RegretBound, TheoryInputs, TnSolution,
};
pub use special::{
    erfc, lambert_w0, lambert_w_minus1, ln_gamma, q_function, q_inverse, regularized_lower_gamma,
    regularized_upper_gamma,
};

use thiserror::Error;

/// Errors from design-rule evaluation and special functions.
#[derive(Debug, Error)]
pub enum TheoryError {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested design point has no feasible solution.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    /// An iteration failed to converge to the requested tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),
}
