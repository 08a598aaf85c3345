//! Solver quality: a signed, range-scaled Hellinger comparison of a
//! candidate solver's reward distribution against a trusted solver's.
//!
//! `M_S = sgn(Δμ) · f^κ · H` with `Δμ = μ_candidate − μ_trusted`,
//! `f = |Δμ| / (r_H − r_L)`, and `H` the Hellinger distance; `x_S` squashes
//! `M_S` into `(0, 2)` with `2 / (1 + exp(−gain · M_S))`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rollout::{summarize, Histogram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverQualityError {
    #[error("invalid solver-quality config: {0}")]
    InvalidConfig(String),
    #[error("histograms do not share bin edges")]
    BinMismatch,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("summary has non-finite or negative fields")]
    InvalidSummary,
}

/// A reward distribution reduced to mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSummary {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianSummary {
    pub fn new(mu: f64, sigma: f64) -> Self {
        GaussianSummary { mu, sigma }
    }

    /// Mean and sample standard deviation.
    pub fn from_samples(values: &[f64]) -> Result<Self, SolverQualityError> {
        if values.len() < 2 {
            return Err(SolverQualityError::TooFewSamples(values.len()));
        }
        let s = summarize(values, 1).map_err(|_| SolverQualityError::InvalidSummary)?;
        Ok(GaussianSummary { mu: s.mean, sigma: s.std })
    }

    fn is_valid(&self) -> bool {
        self.mu.is_finite() && self.sigma.is_finite() && self.sigma >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverQualityConfig {
    pub kappa: f64,
    pub squash_gain: f64,
    pub r_low: f64,
    pub r_high: f64,
}

impl SolverQualityConfig {
    pub const DEFAULT_KAPPA: f64 = 0.5;
    pub const DEFAULT_GAIN: f64 = 5.0;

    /// Default exponent and gain over the reward range `[r_low, r_high]`.
    pub fn new(r_low: f64, r_high: f64) -> Self {
        SolverQualityConfig {
            kappa: Self::DEFAULT_KAPPA,
            squash_gain: Self::DEFAULT_GAIN,
            r_low,
            r_high,
        }
    }

    pub fn validate(&self) -> Result<(), SolverQualityError> {
        let bad = |m: String| Err(SolverQualityError::InvalidConfig(m));
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return bad(format!("kappa {} outside (0, 1)", self.kappa));
        }
        if !(self.squash_gain.is_finite() && self.squash_gain > 0.0) {
            return bad(format!("squash gain {} must be positive", self.squash_gain));
        }
        if !(self.r_low.is_finite() && self.r_high.is_finite() && self.r_high > self.r_low) {
            return bad(format!("reward range [{}, {}] is empty", self.r_low, self.r_high));
        }
        Ok(())
    }

    pub fn range(&self) -> f64 {
        self.r_high - self.r_low
    }

    pub fn sigma_min(&self) -> f64 {
        1e-6 * self.range()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverQualityFlag {
    /// Equal means with different spreads: `x_S = 1` regardless of `H`.
    VarianceBlindFixedPoint,
    /// A standard deviation was raised to the floor.
    SigmaFloored,
    /// `H` came from histograms rather than the Gaussian closed form.
    HistogramMode,
    /// The mean difference exceeds the configured reward range.
    OutsideRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverQualityResult {
    pub mu_c: f64,
    pub sigma_c: f64,
    pub mu_t: f64,
    pub sigma_t: f64,
    pub r_low: f64,
    pub r_high: f64,
    pub kappa: f64,
    pub squash_gain: f64,
    pub h2: f64,
    pub delta_mu: f64,
    pub f: f64,
    pub m_s: f64,
    pub x_s: f64,
    pub flags: Vec<SolverQualityFlag>,
}

/// Squared Hellinger distance between two normal distributions.
pub fn hellinger2_gaussian(p: GaussianSummary, q: GaussianSummary) -> f64 {
    if p == q {
        return 0.0;
    }
    let var_sum = p.sigma * p.sigma + q.sigma * q.sigma;
    if var_sum == 0.0 {
        return 1.0;
    }
    let d = p.mu - q.mu;
    let bc = (2.0 * p.sigma * q.sigma / var_sum).sqrt() * (-0.25 * d * d / var_sum).exp();
    (1.0 - bc).clamp(0.0, 1.0)
}

/// Squared Hellinger distance between two probability vectors.
pub fn hellinger2_probs(p: &[f64], q: &[f64]) -> Result<f64, SolverQualityError> {
    if p.len() != q.len() {
        return Err(SolverQualityError::BinMismatch);
    }
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((1.0 - bc).clamp(0.0, 1.0))
}

/// Squared Hellinger distance between two histograms over the same edges.
pub fn hellinger2_hist(p: &Histogram, q: &Histogram) -> Result<f64, SolverQualityError> {
    if p.edges != q.edges {
        return Err(SolverQualityError::BinMismatch);
    }
    hellinger2_probs(&p.probabilities(), &q.probabilities())
}

/// `2 / (1 + exp(−gain·m))`, evaluated so that `x(m) + x(−m) == 2` exactly.
pub fn squash(m_s: f64, gain: f64) -> f64 {
    if m_s == 0.0 {
        return 1.0;
    }
    let p = 2.0 / (1.0 + (-gain * m_s.abs()).exp());
    if m_s > 0.0 {
        p
    } else {
        2.0 - p
    }
}

fn finish(
    candidate: GaussianSummary,
    trusted: GaussianSummary,
    h2: f64,
    config: &SolverQualityConfig,
    mut flags: Vec<SolverQualityFlag>,
) -> SolverQualityResult {
    let delta_mu = candidate.mu - trusted.mu;
    let f = delta_mu.abs() / config.range();
    if f > 1.0 {
        flags.push(SolverQualityFlag::OutsideRange);
    }
    if delta_mu == 0.0 && h2 > 0.0 {
        flags.push(SolverQualityFlag::VarianceBlindFixedPoint);
    }
    let m_s = if delta_mu == 0.0 {
        0.0
    } else {
        delta_mu.signum() * f.powf(config.kappa) * h2.sqrt()
    };
    SolverQualityResult {
        mu_c: candidate.mu,
        sigma_c: candidate.sigma,
        mu_t: trusted.mu,
        sigma_t: trusted.sigma,
        r_low: config.r_low,
        r_high: config.r_high,
        kappa: config.kappa,
        squash_gain: config.squash_gain,
        h2,
        delta_mu,
        f,
        m_s,
        x_s: squash(m_s, config.squash_gain),
        flags,
    }
}

/// Compares Gaussian summaries of the candidate and trusted solvers.
pub fn solver_quality(
    candidate: GaussianSummary,
    trusted: GaussianSummary,
    config: &SolverQualityConfig,
) -> Result<SolverQualityResult, SolverQualityError> {
    config.validate()?;
    if !candidate.is_valid() || !trusted.is_valid() {
        return Err(SolverQualityError::InvalidSummary);
    }
    let floor = config.sigma_min();
    let mut flags = Vec::new();
    let mut floored = |g: GaussianSummary| {
        if g.sigma < floor {
            flags.push(SolverQualityFlag::SigmaFloored);
            GaussianSummary::new(g.mu, floor)
        } else {
            g
        }
    };
    let c = floored(candidate);
    let t = floored(trusted);
    flags.dedup();
    let h2 = hellinger2_gaussian(c, t);
    Ok(finish(c, t, h2, config, flags))
}

/// The trusted side of a comparison: measured rewards or a prediction.
#[derive(Debug, Clone, Copy)]
pub enum Trusted<'a> {
    Samples(&'a [f64]),
    Summary(GaussianSummary),
}

/// Summarizes candidate (and, if measured, trusted) samples and compares
/// them with [`solver_quality`].
pub fn x_s_from_samples(
    candidate: &[f64],
    trusted: Trusted<'_>,
    config: &SolverQualityConfig,
) -> Result<SolverQualityResult, SolverQualityError> {
    let c = GaussianSummary::from_samples(candidate)?;
    let t = match trusted {
        Trusted::Samples(values) => GaussianSummary::from_samples(values)?,
        Trusted::Summary(g) => g,
    };
    solver_quality(c, t, config)
}

/// Histogram variant: `H²` from `bins` shared equal-width bins over the
/// configured reward range, `Δμ` from the sample means.
pub fn x_s_histogram(
    candidate: &[f64],
    trusted: &[f64],
    bins: usize,
    config: &SolverQualityConfig,
) -> Result<SolverQualityResult, SolverQualityError> {
    config.validate()?;
    if bins == 0 {
        return Err(SolverQualityError::InvalidConfig("bin count must be positive".into()));
    }
    let c = GaussianSummary::from_samples(candidate)?;
    let t = GaussianSummary::from_samples(trusted)?;
    let edges = Histogram::equal_width(config.r_low, config.r_high, bins);
    let hc = Histogram::with_edges(candidate, edges.clone());
    let ht = Histogram::with_edges(trusted, edges);
    let h2 = hellinger2_hist(&hc, &ht)?;
    Ok(finish(c, t, h2, config, vec![SolverQualityFlag::HistogramMode]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mu: f64, sigma: f64) -> GaussianSummary {
        GaussianSummary::new(mu, sigma)
    }

    #[test]
    fn gaussian_closed_form_examples() {
        assert_eq!(hellinger2_gaussian(g(0.0, 1.0), g(0.0, 1.0)), 0.0);
        assert!((hellinger2_gaussian(g(0.0, 1.0), g(1.0, 1.0)) - (1.0 - (-0.125f64).exp())).abs() < 1e-15);
        assert!((hellinger2_gaussian(g(0.0, 1.0), g(0.0, 2.0)) - (1.0 - 0.8f64.sqrt())).abs() < 1e-15);
        assert!((hellinger2_gaussian(g(0.0, 1.0), g(1.0, 1.0)) - 0.117503).abs() < 1e-6);
        assert!((hellinger2_gaussian(g(0.0, 1.0), g(0.0, 2.0)) - 0.105573).abs() < 1e-6);
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(hellinger2_probs(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(hellinger2_probs(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hellinger2_probs(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5]).unwrap(), 0.5);
        let a = Histogram::with_edges(&[0.5], vec![0.0, 1.0, 2.0]);
        let b = Histogram::with_edges(&[0.5], vec![0.0, 1.0, 3.0]);
        assert_eq!(hellinger2_hist(&a, &b), Err(SolverQualityError::BinMismatch));
    }

    #[test]
    fn worked_example_and_swap() {
        let cfg = SolverQualityConfig::new(-10.0, 10.0);
        let r = solver_quality(g(1.0, 1.0), g(0.0, 1.0), &cfg).unwrap();
        assert!((r.f - 0.05).abs() < 1e-15);
        // independent evaluation: sqrt(0.05)·sqrt(1 − e^{−1/8})
        assert!((r.m_s - 0.076_649_558_842_632_8).abs() < 1e-12);
        assert!((r.x_s - 1.1893).abs() < 1e-4);
        let s = solver_quality(g(0.0, 1.0), g(1.0, 1.0), &cfg).unwrap();
        assert_eq!(r.x_s + s.x_s, 2.0);
        assert!((s.x_s - 0.8107).abs() < 1e-4);
        assert!(s.m_s < 0.0);
    }

    #[test]
    fn identical_summaries_are_parity() {
        let cfg = SolverQualityConfig::new(-2000.0, 2000.0);
        let r = solver_quality(g(5.0, 3.0), g(5.0, 3.0), &cfg).unwrap();
        assert_eq!((r.h2, r.m_s, r.x_s), (0.0, 0.0, 1.0));
        let zero = solver_quality(g(5.0, 0.0), g(5.0, 0.0), &cfg).unwrap();
        assert_eq!(zero.x_s, 1.0);
        assert_eq!(zero.flags, vec![SolverQualityFlag::SigmaFloored]);
    }

    #[test]
    fn equal_means_with_different_spread_are_flagged() {
        let cfg = SolverQualityConfig::new(0.0, 10.0);
        let r = solver_quality(g(5.0, 1.0), g(5.0, 3.0), &cfg).unwrap();
        assert!(r.h2 > 0.0);
        assert_eq!(r.x_s, 1.0);
        assert!(r.flags.contains(&SolverQualityFlag::VarianceBlindFixedPoint));
    }

    #[test]
    fn saturation_at_unit_meta_utility() {
        assert!((squash(1.0, 5.0) - 1.987).abs() < 1e-3);
        assert!((squash(-1.0, 5.0) - 0.013).abs() < 1e-3);
    }

    #[test]
    fn config_is_validated() {
        let bad = SolverQualityConfig::new(1.0, 1.0);
        assert!(matches!(solver_quality(g(0.0, 1.0), g(0.0, 1.0), &bad), Err(SolverQualityError::InvalidConfig(_))));
        let bad_kappa = SolverQualityConfig { kappa: 1.0, ..SolverQualityConfig::new(0.0, 1.0) };
        assert!(bad_kappa.validate().is_err());
        let ok = SolverQualityConfig::new(0.0, 1.0);
        assert_eq!(solver_quality(g(f64::NAN, 1.0), g(0.0, 1.0), &ok), Err(SolverQualityError::InvalidSummary));
    }

    #[test]
    fn sample_paths() {
        let cfg = SolverQualityConfig::new(-100.0, 100.0);
        let t = [1.0, 2.0, 3.0, 4.0];
        let same = x_s_from_samples(&t, Trusted::Samples(&t), &cfg).unwrap();
        assert_eq!(same.x_s, 1.0);
        let low = x_s_from_samples(&[-90.0, -90.0], Trusted::Summary(g(90.0, 1.0)), &SolverQualityConfig::new(-100.0, 100.0)).unwrap();
        assert!(low.x_s < 0.1);
        assert_eq!(x_s_from_samples(&[1.0], Trusted::Samples(&t), &cfg), Err(SolverQualityError::TooFewSamples(1)));
        let h = x_s_histogram(&t, &t, 10, &cfg).unwrap();
        assert_eq!(h.x_s, 1.0);
        assert_eq!(h.flags, vec![SolverQualityFlag::HistogramMode]);
    }
}
