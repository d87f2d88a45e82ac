//! Simulation and analysis toolkit for non-stationary two-armed bandits.
//!
//! The crate is organized around an actively adaptive Thompson sampling
//! policy (TS-CD) that pairs Beta-posterior sampling with an online
//! mean-shift detector, and everything needed to study it end to end:
//!
//! - [`bandit`] — piecewise-stationary Gaussian environments with Poisson
//!   change arrivals, named RNG streams, and regret accounting.
//! - [`changedetect`] — the windowed mean-shift test (test window vs
//!   estimate window against a threshold) and a Page-Hinkley detector.
//! - [`policies`] — TS-CD plus the comparison set: classical TS, D-UCB,
//!   SW-UCB, discounted TS, REXP3, PHT-UCB, and the clairvoyant
//!   Fixed/Oracle references, all behind one [`policies::Policy`] trait.
//! - [`theory`] — closed-form design rules for the detector (stationary
//!   phase length, test-window size, threshold, admissible change rate,
//!   regret bound) and the special functions they need, each cross-checked
//!   against an independent numeric oracle in the test suite.
//! - [`wireless`] — a stochastic-geometry case study: SINR coverage
//!   probabilities under a Poisson network with a LOS-ball blockage model,
//!   driving a two-state RAT-selection reward environment.
//! - [`harness`] — configuration, batch experiment runner, CSV/manifest
//!   persistence, detection metrics, and curve emission.
//!
//! Start with the runnable programs in `examples/`; each one demonstrates a
//! major capability. The `tscd` binary exposes the same machinery as CLI
//! subcommands (`run`, `theory`, `coverage`, `oracle`).

pub mod bandit;
pub mod changedetect;
pub mod harness;
pub mod policies;
pub mod theory;
pub mod wireless;
