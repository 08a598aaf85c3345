//! Core library for computing and validating machine self-confidence
//! indicators on MDP-based agents.
//!
//! - [`mdp`]: enumerable MDPs, value iteration, Monte-Carlo tree search.
//! - [`delivery`]: the delivery-truck pursuit-evasion domain on random road
//!   networks, compiled into an MDP.
//! - [`rollout`]: Monte-Carlo policy simulation and reward summaries.
//! - [`outcome`]: outcome assessment (partial moments, Omega ratio, discrete
//!   GOA, prospect-theory value, confidence profiles).
//! - [`solver_quality`]: signed Hellinger-based comparison of a candidate
//!   solver against a trusted one.
//! - [`surrogate`]: feed-forward regressors predicting trusted-solver reward
//!   statistics from task features.
//! - [`calibration`]: Brier scoring of success predictions.

pub mod calibration;
pub mod delivery;
pub mod mdp;
pub mod outcome;
pub mod rollout;
pub mod seed;
pub mod solver;
pub mod solver_quality;
pub mod surrogate;
