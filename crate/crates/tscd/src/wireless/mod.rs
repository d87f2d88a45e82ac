//! Stochastic-geometry case study: RAT selection between a sub-6GHz and a
//! mm-wave band under a Poisson network with LOS-ball blockage.
//!
//! Access points form a homogeneous PPP of density λ. Links shorter than
//! the LOS-ball radius `d` are line-of-sight, longer ones are not. Each
//! RAT's received powers are folded into one-dimensional path-loss
//! processes ξ = r^α/(K·P) whose intensity measures have closed forms;
//! SINR coverage probabilities follow from them by quadrature and serve as
//! the arm mean rewards of a two-state (LOS/NLOS) Markov environment.

pub mod coverage;
pub mod markov;
pub mod oracle;
pub mod quadrature;

pub use coverage::{
    build_mean_table, coverage_mmwave, coverage_sub6, coverage_truncated,
    truncation_error_estimate, MeanTable, ServingPathloss,
};
pub use markov::{markov_trace, step_markov_env, MarkovRatEnvironment};
pub use oracle::{coverage_mc, intensity_count_mc, serving_pathloss_median_mc, TRUNCATION_FACTOR};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from scenario validation and coverage evaluation.
#[derive(Debug, Error)]
pub enum WirelessError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("coverage quadrature failed: {0}")]
    Quadrature(#[from] quadrature::QuadError),
}

/// Radio access technology, i.e. the two arms of the case study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rat {
    Sub6,
    MmWave,
}

impl Rat {
    pub const BOTH: [Rat; 2] = [Rat::Sub6, Rat::MmWave];

    pub fn index(self) -> usize {
        match self {
            Rat::Sub6 => 0,
            Rat::MmWave => 1,
        }
    }
}

/// Visibility state of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Los,
    Nlos,
}

impl Visibility {
    pub const BOTH: [Visibility; 2] = [Visibility::Los, Visibility::Nlos];

    pub fn index(self) -> usize {
        match self {
            Visibility::Los => 0,
            Visibility::Nlos => 1,
        }
    }

    pub fn toggled(self) -> Visibility {
        match self {
            Visibility::Los => Visibility::Nlos,
            Visibility::Nlos => Visibility::Los,
        }
    }
}

/// Per-RAT radio parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatParams {
    /// Transmit power P_r (normalized units).
    pub tx_power: f64,
    /// Path-loss constant K_r.
    pub pathloss_const: f64,
    /// LOS path-loss exponent α_{rL} (> 2).
    pub pathloss_exp_los: f64,
    /// NLOS path-loss exponent α_{rN} (> 2).
    pub pathloss_exp_nlos: f64,
    /// Noise power σ²_{N,r} (same normalized units as received power).
    pub noise_power: f64,
}

impl RatParams {
    /// Lumped link budget K_r·P_r.
    pub fn kp(&self) -> f64 {
        self.pathloss_const * self.tx_power
    }

    pub fn exponent(&self, vis: Visibility) -> f64 {
        match vis {
            Visibility::Los => self.pathloss_exp_los,
            Visibility::Nlos => self.pathloss_exp_nlos,
        }
    }

    /// Path-loss coordinate of a link of length `r` in state `vis`.
    pub fn pathloss_at(&self, r: f64, vis: Visibility) -> f64 {
        r.powf(self.exponent(vis)) / self.kp()
    }
}

/// Scenario: network geometry, per-RAT radio parameters, antenna-gain PMF,
/// and the SINR threshold defining coverage.
///
/// Powers are pre-normalized so that received power at path-loss ξ is
/// simply `gain/ξ`; noise powers share those units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WirelessScenario {
    /// AP density λ (points per unit area).
    pub ap_density: f64,
    /// LOS-ball radius d (distance units).
    pub los_radius: f64,
    pub sub6: RatParams,
    pub mmwave: RatParams,
    /// mm-wave product antenna gain PMF: (gain value a_k, probability b_k).
    /// The values are config-supplied and not authoritative.
    pub gain_pmf: Vec<(f64, f64)>,
    /// SINR threshold γ.
    pub sinr_threshold: f64,
    /// Serving path-loss override per (RAT, visibility); when absent the
    /// median nearest-AP path loss is estimated by the Monte Carlo oracle.
    pub serving_pathloss: Option<[[f64; 2]; 2]>,
}

impl Default for WirelessScenario {
    /// The validated default configuration of the case study.
    fn default() -> Self {
        Self {
            ap_density: 1e-4,
            los_radius: 40.0,
            sub6: RatParams {
                tx_power: 1.0,
                pathloss_const: 1e6,
                pathloss_exp_los: 2.5,
                pathloss_exp_nlos: 2.8,
                noise_power: 26.0,
            },
            mmwave: RatParams {
                tx_power: 1.0,
                pathloss_const: 2e5,
                pathloss_exp_los: 2.1,
                pathloss_exp_nlos: 4.0,
                noise_power: 40.0,
            },
            gain_pmf: vec![(100.0, 0.35), (20.0, 0.3), (3.0, 0.25), (0.5, 0.1)],
            sinr_threshold: 0.4,
            serving_pathloss: None,
        }
    }
}

impl WirelessScenario {
    pub fn rat(&self, rat: Rat) -> &RatParams {
        match rat {
            Rat::Sub6 => &self.sub6,
            Rat::MmWave => &self.mmwave,
        }
    }

    /// Largest antenna gain G₀ (the serving beam is aligned).
    pub fn max_gain(&self) -> f64 {
        self.gain_pmf.iter().map(|&(a, _)| a).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn validate(&self) -> Result<(), WirelessError> {
        if !(self.ap_density > 0.0) || !(self.los_radius > 0.0) {
            return Err(WirelessError::InvalidScenario(format!(
                "density and LOS radius must be > 0, got {} and {}",
                self.ap_density, self.los_radius
            )));
        }
        if !(self.sinr_threshold > 0.0) {
            return Err(WirelessError::InvalidScenario(format!(
                "sinr_threshold must be > 0, got {}",
                self.sinr_threshold
            )));
        }
        for (name, p) in [("sub6", &self.sub6), ("mmwave", &self.mmwave)] {
            if !(p.tx_power > 0.0) || !(p.pathloss_const > 0.0) || !(p.noise_power > 0.0) {
                return Err(WirelessError::InvalidScenario(format!(
                    "{name}: powers, constants and noise must be > 0"
                )));
            }
            if p.pathloss_exp_los <= 2.0 || p.pathloss_exp_nlos <= 2.0 {
                return Err(WirelessError::InvalidScenario(format!(
                    "{name}: path-loss exponents must exceed 2 (got {} / {})",
                    p.pathloss_exp_los, p.pathloss_exp_nlos
                )));
            }
        }
        if self.gain_pmf.is_empty() {
            return Err(WirelessError::InvalidScenario("gain_pmf must be non-empty".into()));
        }
        let mut total = 0.0;
        for &(a, b) in &self.gain_pmf {
            if !(a > 0.0) || b < 0.0 {
                return Err(WirelessError::InvalidScenario(format!(
                    "gain_pmf entries need a > 0 and b >= 0, got ({a}, {b})"
                )));
            }
            total += b;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(WirelessError::InvalidScenario(format!(
                "gain_pmf probabilities sum to {total}, expected 1"
            )));
        }
        if let Some(x) = &self.serving_pathloss {
            if x.iter().flatten().any(|&v| !(v > 0.0)) {
                return Err(WirelessError::InvalidScenario(
                    "serving_pathloss overrides must be > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Cumulative intensity Λ'_{v r}([0, t]) of the one-dimensional path-loss
/// process for RAT `rat` restricted to visibility component `vis`.
///
/// LOS points live inside the ball: Λ' = λπ·min(d, (t·K·P)^{1/α_L})².
/// NLOS points live beyond it:     Λ' = λπ·max(0, (t·K·P)^{2/α_N} − d²).
pub fn pathloss_intensity(sc: &WirelessScenario, rat: Rat, vis: Visibility, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let p = sc.rat(rat);
    let lambda_pi = sc.ap_density * std::f64::consts::PI;
    let radius = (t * p.kp()).powf(1.0 / p.exponent(vis));
    match vis {
        Visibility::Los => {
            let r = radius.min(sc.los_radius);
            lambda_pi * r * r
        }
        Visibility::Nlos => {
            let excess = radius * radius - sc.los_radius * sc.los_radius;
            lambda_pi * excess.max(0.0)
        }
    }
}

/// Support and power-law parameters of one intensity component.
///
/// On its support, the density is dΛ'/dt = coef·κ·t^{κ−1} with κ = 2/α.
#[derive(Debug, Clone, Copy)]
pub(crate) struct IntensityComponent {
    pub kappa: f64,
    pub coef: f64,
    /// Support lower edge (0 for LOS, ball-boundary path loss for NLOS).
    pub lo: f64,
    /// Support upper edge (ball-boundary path loss for LOS, ∞ for NLOS).
    pub hi: f64,
}

pub(crate) fn intensity_component(
    sc: &WirelessScenario,
    rat: Rat,
    vis: Visibility,
) -> IntensityComponent {
    let p = sc.rat(rat);
    let alpha = p.exponent(vis);
    let kappa = 2.0 / alpha;
    let coef = sc.ap_density * std::f64::consts::PI * p.kp().powf(kappa);
    let boundary = sc.los_radius.powf(alpha) / p.kp();
    match vis {
        Visibility::Los => IntensityComponent { kappa, coef, lo: 0.0, hi: boundary },
        Visibility::Nlos => IntensityComponent { kappa, coef, lo: boundary, hi: f64::INFINITY },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intensity_zero_at_origin_and_saturates_for_los() {
        let sc = WirelessScenario::default();
        for rat in Rat::BOTH {
            for vis in Visibility::BOTH {
                assert_eq!(pathloss_intensity(&sc, rat, vis, 0.0), 0.0);
            }
            let cap = sc.ap_density * std::f64::consts::PI * sc.los_radius * sc.los_radius;
            let big = pathloss_intensity(&sc, rat, Visibility::Los, 1e12);
            assert!((big - cap).abs() < 1e-9 * cap, "LOS did not saturate: {big} vs {cap}");
        }
    }

    #[test]
    fn intensity_monotone_in_t_density_and_radius() {
        let sc = WirelessScenario::default();
        for rat in Rat::BOTH {
            for vis in Visibility::BOTH {
                let mut prev = 0.0;
                for i in 1..200 {
                    let t = 1e-4 * (1.3f64).powi(i);
                    let v = pathloss_intensity(&sc, rat, vis, t);
                    assert!(v >= prev - 1e-12, "{rat:?} {vis:?} not monotone at t={t}");
                    prev = v;
                }
            }
        }
        let denser = WirelessScenario { ap_density: 2e-4, ..WirelessScenario::default() };
        let wider = WirelessScenario { los_radius: 60.0, ..WirelessScenario::default() };
        for t in [1e-3, 1e-2, 1e-1] {
            assert!(
                pathloss_intensity(&denser, Rat::Sub6, Visibility::Los, t)
                    >= pathloss_intensity(&sc, Rat::Sub6, Visibility::Los, t)
            );
            assert!(
                pathloss_intensity(&wider, Rat::Sub6, Visibility::Los, t)
                    >= pathloss_intensity(&sc, Rat::Sub6, Visibility::Los, t)
            );
        }
    }

    #[test]
    fn component_density_integrates_to_intensity() {
        // ∫ density over [0, t] must reproduce the closed form.
        let sc = WirelessScenario::default();
        for rat in Rat::BOTH {
            for vis in Visibility::BOTH {
                let comp = intensity_component(&sc, rat, vis);
                let t = match vis {
                    Visibility::Los => comp.hi * 0.7,
                    Visibility::Nlos => comp.lo * 3.0,
                };
                let lo = comp.lo;
                let numeric = quadrature::integrate(
                    |y| comp.coef * comp.kappa * y.powf(comp.kappa - 1.0),
                    lo.max(1e-12),
                    t,
                    1e-10,
                )
                .unwrap();
                let closed = pathloss_intensity(&sc, rat, vis, t)
                    - pathloss_intensity(&sc, rat, vis, lo.max(1e-12));
                assert!(
                    (numeric - closed).abs() < 1e-6 * closed.abs().max(1e-9),
                    "{rat:?} {vis:?}: {numeric} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn default_scenario_validates() {
        WirelessScenario::default().validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_scenarios() {
        let mut sc = WirelessScenario::default();
        sc.sub6.pathloss_exp_los = 1.9;
        assert!(sc.validate().is_err());

        let mut sc = WirelessScenario::default();
        sc.gain_pmf = vec![(10.0, 0.5), (1.0, 0.4)];
        assert!(sc.validate().is_err());

        let mut sc = WirelessScenario::default();
        sc.ap_density = 0.0;
        assert!(sc.validate().is_err());
    }
}
