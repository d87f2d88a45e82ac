//! Adaptive Simpson quadrature with a semi-infinite transform.
//!
//! Tails over `[x, ∞)` are mapped to `[0, 1)` by `y = x/(1−u)`. The
//! integrands here end in an exact power-law tail, so the numeric part
//! stops at a finite `u₀` and the remainder is summed in closed form by
//! the caller; this module only provides the finite-interval machinery.

use thiserror::Error;

/// Quadrature failure with the interval that refused to converge.
#[derive(Debug, Error)]
#[error("adaptive quadrature did not reach tolerance {tolerance:e} on [{lo}, {hi}] (depth {depth})")]
pub struct QuadError {
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
    pub depth: usize,
}

const MAX_DEPTH: usize = 60;

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    eps: f64,
    depth: usize,
) -> Result<f64, QuadError> {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(QuadError { lo: a, hi: b, tolerance: eps, depth });
    }
    let half = 0.5 * eps;
    Ok(adapt(f, a, fa, m, fm, left, lm, flm, half, depth + 1)?
        + adapt(f, m, fm, b, fb, right, rm, frm, half, depth + 1)?)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `eps`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> Result<f64, QuadError> {
    if a >= b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adapt(&f, a, fa, b, fb, whole, m, fm, eps, 0)
}

/// Integrate `g(y)` over `[lo, hi] ⊆ [x, ∞)` through the `y = x/(1−u)`
/// substitution: ∫ g(y) dy = ∫ g(x/(1−u)) · x/(1−u)² du.
pub fn integrate_transformed<G: Fn(f64) -> f64>(
    g: G,
    x: f64,
    lo: f64,
    hi: f64,
    eps: f64,
) -> Result<f64, QuadError> {
    debug_assert!(x > 0.0 && lo >= x);
    let u_of = |y: f64| 1.0 - x / y;
    let integrand = |u: f64| {
        let rem = 1.0 - u;
        let y = x / rem;
        g(y) * x / (rem * rem)
    };
    integrate(integrand, u_of(lo), u_of(hi), eps)
}
