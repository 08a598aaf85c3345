//! Outcome assessment: how the distribution of task outcomes sits relative
//! to a minimal acceptable outcome `z*`.
//!
//! The main indicator maps the upper and lower partial moments about `z*`
//! into `[-1, 1]` with `(UPM^k − LPM^k) / (UPM^k + LPM^k)`. Moments are
//! accumulated as sums and the `1/n` factor is never applied before the
//! ratio, so shifting or scaling integer-valued data leaves `x_O` bit-identical.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutcomeError {
    #[error("sample set is empty")]
    EmptySamples,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("invalid outcome standard: {0}")]
    InvalidStandard(String),
    #[error("invalid discrete distribution: {0}")]
    InvalidDist(String),
    #[error("invalid prospect-theory bounds: l- = {l_minus} exceeds g+ = {g_plus}")]
    InvalidBounds { l_minus: f64, g_plus: f64 },
    #[error("confidence profile grid is empty")]
    EmptyGrid,
}

/// The evaluator's competency standard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStandard {
    pub z_star: f64,
    pub alpha: u32,
    pub k: f64,
}

impl Default for OutcomeStandard {
    fn default() -> Self {
        OutcomeStandard {
            z_star: 0.0,
            alpha: 1,
            k: 1.0,
        }
    }
}

impl OutcomeStandard {
    pub fn new(z_star: f64, alpha: u32, k: f64) -> Result<Self, OutcomeError> {
        let std = OutcomeStandard { z_star, alpha, k };
        std.validate()?;
        Ok(std)
    }

    pub fn validate(&self) -> Result<(), OutcomeError> {
        if !self.z_star.is_finite() {
            return Err(OutcomeError::InvalidStandard("z* must be finite".into()));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(OutcomeError::InvalidStandard(format!("k must be positive, got {}", self.k)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeFlag {
    /// Both moments are zero: every outcome sits exactly on the standard.
    StandardExactlyMet,
    /// All mass is on the favorable side.
    NoDownside,
    /// All mass is on the unfavorable side.
    NoUpside,
}

/// Partial moments about `z*` and the resulting indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeAssessmentResult {
    pub z_star: f64,
    pub alpha: u32,
    pub k: f64,
    pub upm: f64,
    pub lpm: f64,
    pub x_o: f64,
    pub n: usize,
    pub flags: Vec<OutcomeFlag>,
}

impl OutcomeAssessmentResult {
    /// `upm / lpm`, with `0/x → 0` and `x/0 → +∞`. `None` when both are zero.
    pub fn ratio(&self) -> Option<f64> {
        partial_ratio(self.upm, self.lpm)
    }
}

/// Empirical partial moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialMoments {
    pub upm: f64,
    pub lpm: f64,
}

impl PartialMoments {
    pub fn ratio(&self) -> Option<f64> {
        partial_ratio(self.upm, self.lpm)
    }
}

fn partial_ratio(upm: f64, lpm: f64) -> Option<f64> {
    match (upm > 0.0, lpm > 0.0) {
        (false, false) => None,
        (_, false) => Some(f64::INFINITY),
        _ => Some(upm / lpm),
    }
}

fn check_samples(samples: &[f64]) -> Result<(), OutcomeError> {
    if samples.is_empty() {
        return Err(OutcomeError::EmptySamples);
    }
    if samples.iter().any(|z| !z.is_finite()) {
        return Err(OutcomeError::NonFinite);
    }
    Ok(())
}

/// Unnormalized moment sums. For `alpha == 0` a sample equal to `z*` counts
/// as favorable.
fn moment_sums(samples: &[f64], z_star: f64, alpha: u32) -> (f64, f64) {
    let mut up = 0.0;
    let mut down = 0.0;
    for &z in samples {
        let d = z - z_star;
        if alpha == 0 {
            if d >= 0.0 {
                up += 1.0;
            } else {
                down += 1.0;
            }
        } else if d > 0.0 {
            up += pow_u(d, alpha);
        } else if d < 0.0 {
            down += pow_u(-d, alpha);
        }
    }
    (up, down)
}

fn pow_u(x: f64, alpha: u32) -> f64 {
    match i32::try_from(alpha) {
        Ok(a) => x.powi(a),
        Err(_) => x.powf(f64::from(alpha)),
    }
}

/// Empirical `α`-order upper and lower partial moments about `z_star`.
pub fn upm_lpm(samples: &[f64], z_star: f64, alpha: u32) -> Result<PartialMoments, OutcomeError> {
    check_samples(samples)?;
    let (up, down) = moment_sums(samples, z_star, alpha);
    let n = samples.len() as f64;
    Ok(PartialMoments {
        upm: up / n,
        lpm: down / n,
    })
}

/// `(upm^k − lpm^k) / (upm^k + lpm^k)`, or 0 when both are zero. Inputs may
/// be moments or any common positive multiple of them.
pub fn x_o_from_ratio(upm: f64, lpm: f64, k: f64) -> f64 {
    if upm <= 0.0 && lpm <= 0.0 {
        return 0.0;
    }
    if lpm <= 0.0 {
        return 1.0;
    }
    if upm <= 0.0 {
        return -1.0;
    }
    let (a, b) = if k == 1.0 { (upm, lpm) } else { (upm.powf(k), lpm.powf(k)) };
    let x = if a.is_finite() && b.is_finite() && a + b > 0.0 && (a + b).is_finite() {
        (a - b) / (a + b)
    } else {
        // ratio form for extreme magnitudes
        let r = (upm.min(lpm) / upm.max(lpm)).powf(k);
        let mag = (1.0 - r) / (1.0 + r);
        if upm >= lpm {
            mag
        } else {
            -mag
        }
    };
    // ±1 is reserved for one-sided mass
    x.clamp((-1.0f64).next_up(), 1.0f64.next_down())
}

fn flags_for(up: f64, down: f64) -> Vec<OutcomeFlag> {
    match (up > 0.0, down > 0.0) {
        (false, false) => vec![OutcomeFlag::StandardExactlyMet],
        (true, false) => vec![OutcomeFlag::NoDownside],
        (false, true) => vec![OutcomeFlag::NoUpside],
        (true, true) => Vec::new(),
    }
}

/// Full outcome assessment of a sample against `std`.
pub fn assess_outcome(samples: &[f64], std: &OutcomeStandard) -> Result<OutcomeAssessmentResult, OutcomeError> {
    check_samples(samples)?;
    std.validate()?;
    let (up, down) = moment_sums(samples, std.z_star, std.alpha);
    let n = samples.len();
    Ok(OutcomeAssessmentResult {
        z_star: std.z_star,
        alpha: std.alpha,
        k: std.k,
        upm: up / n as f64,
        lpm: down / n as f64,
        x_o: x_o_from_ratio(up, down, std.k),
        n,
        flags: flags_for(up, down),
    })
}

/// Odds of a favorable outcome (`z ≥ z*`) against an unfavorable one.
/// Returns `+∞` when every sample is favorable.
pub fn omega_ratio(samples: &[f64], z_star: f64) -> Result<f64, OutcomeError> {
    check_samples(samples)?;
    let (up, down) = moment_sums(samples, z_star, 0);
    Ok(if down == 0.0 { f64::INFINITY } else { up / down })
}

/// A probability distribution over ordered integer outcome classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteOutcomeDist {
    classes: Vec<i64>,
    probs: Vec<f64>,
}

impl DiscreteOutcomeDist {
    pub fn new(classes: Vec<i64>, probs: Vec<f64>) -> Result<Self, OutcomeError> {
        let bad = |m: &str| Err(OutcomeError::InvalidDist(m.into()));
        if classes.is_empty() || classes.len() != probs.len() {
            return bad("classes and probabilities must be non-empty and of equal length");
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("classes must be strictly increasing");
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("probabilities must lie in [0, 1]");
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("probabilities must sum to 1");
        }
        Ok(DiscreteOutcomeDist { classes, probs })
    }

    pub fn classes(&self) -> &[i64] {
        &self.classes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Generalized outcome assessment over discrete classes: the favorable
/// score weights class `z ≥ z*` by `z − z* + 1`, so meeting the standard
/// exactly still counts; the unfavorable score weights `z < z*` by `z* − z`.
pub fn goa(dist: &DiscreteOutcomeDist, z_star: i64, k: f64) -> Result<OutcomeAssessmentResult, OutcomeError> {
    if !(k.is_finite() && k > 0.0) {
        return Err(OutcomeError::InvalidStandard(format!("k must be positive, got {k}")));
    }
    let lo = dist.classes[0];
    let hi = dist.classes[dist.classes.len() - 1];
    if z_star < lo.saturating_sub(1) || z_star > hi.saturating_add(1) {
        return Err(OutcomeError::InvalidDist(format!(
            "z* = {z_star} is not within or adjacent to the class range [{lo}, {hi}]"
        )));
    }
    let mut up = 0.0;
    let mut down = 0.0;
    for (&z, &p) in dist.classes.iter().zip(&dist.probs) {
        if z >= z_star {
            up += (z - z_star + 1) as f64 * p;
        } else {
            down += (z_star - z) as f64 * p;
        }
    }
    Ok(OutcomeAssessmentResult {
        z_star: z_star as f64,
        alpha: 1,
        k,
        upm: up,
        lpm: down,
        x_o: x_o_from_ratio(up, down, k),
        n: dist.classes.len(),
        flags: flags_for(up, down),
    })
}

/// Prospect-theory meta-utility: a value function over outcomes, a
/// probability weighting over cumulative probabilities, and the loss and
/// gain bounds.
pub struct CptSpec<V, W> {
    pub value_fn: V,
    pub weight_fn: W,
    pub l_minus: f64,
    pub g_plus: f64,
}

impl<V: Fn(f64) -> f64, W: Fn(f64) -> f64> CptSpec<V, W> {
    pub fn new(value_fn: V, weight_fn: W, l_minus: f64, g_plus: f64) -> Result<Self, OutcomeError> {
        if l_minus.partial_cmp(&g_plus).is_none_or(|o| o.is_gt()) {
            return Err(OutcomeError::InvalidBounds { l_minus, g_plus });
        }
        Ok(CptSpec {
            value_fn,
            weight_fn,
            l_minus,
            g_plus,
        })
    }
}

/// A plain function pointer, as used by [`identity_cpt`].
pub type RealFn = fn(f64) -> f64;

/// Identity value and weighting, under which [`cpt_value`] with
/// `l⁻ = g⁺` is the sample mean.
pub fn identity_cpt(bound: f64) -> CptSpec<RealFn, RealFn> {
    CptSpec {
        value_fn: |z| z,
        weight_fn: |p| p,
        l_minus: bound,
        g_plus: bound,
    }
}

/// Evaluates the prospect-theory utility against the empirical CDF of
/// `samples`. Losses are atoms `z ≤ l⁻`, weighted by increments of
/// `w(F(z))`; gains are atoms `z > g⁺`, weighted by decrements of
/// `w(1 − F(z))`.
pub fn cpt_value<V, W>(samples: &[f64], spec: &CptSpec<V, W>) -> Result<f64, OutcomeError>
where
    V: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    check_samples(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let w = &spec.weight_fn;
    let v = &spec.value_fn;
    let mut total = 0.0;
    let mut below = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let z = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == z {
            j += 1;
        }
        let f_prev = below as f64 / n;
        let f_here = j as f64 / n;
        if z <= spec.l_minus {
            total += v(z) * (w(f_here) - w(f_prev));
        } else if z > spec.g_plus {
            total += v(z) * (w(1.0 - f_prev) - w(1.0 - f_here));
        }
        below = j;
        i = j;
    }
    Ok(total)
}

/// `x_O` over a grid of standards, sorted by `z*`.
pub fn confidence_profile(samples: &[f64], grid: &[f64], alpha: u32, k: f64) -> Result<Vec<(f64, f64)>, OutcomeError> {
    if grid.is_empty() {
        return Err(OutcomeError::EmptyGrid);
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.into_iter()
        .map(|z_star| {
            let std = OutcomeStandard::new(z_star, alpha, k)?;
            Ok((z_star, assess_outcome(samples, &std)?.x_o))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(samples: &[f64]) -> f64 {
        assess_outcome(samples, &OutcomeStandard::default()).unwrap().x_o
    }

    #[test]
    fn ratio_five_example() {
        let m = upm_lpm(&[-5.0, 25.0], 0.0, 1).unwrap();
        assert_eq!((m.upm, m.lpm), (12.5, 2.5));
        assert_eq!(m.ratio(), Some(5.0));
        assert_eq!(x(&[-5.0, 25.0]), 2.0 / 3.0);
        assert_eq!(x(&[5.0, -25.0]), -2.0 / 3.0);
    }

    #[test]
    fn one_sided_mass_hits_the_endpoints() {
        let r = assess_outcome(&[10.0], &OutcomeStandard::default()).unwrap();
        assert_eq!(r.x_o, 1.0);
        assert_eq!(r.ratio(), Some(f64::INFINITY));
        assert_eq!(r.flags, vec![OutcomeFlag::NoDownside]);
        assert_eq!(x(&[-10.0, -3.0]), -1.0);
    }

    #[test]
    fn exactly_met_standard_is_neutral() {
        let r = assess_outcome(&[0.0, 0.0], &OutcomeStandard::default()).unwrap();
        assert_eq!(r.x_o, 0.0);
        assert_eq!(r.ratio(), None);
        assert_eq!(r.flags, vec![OutcomeFlag::StandardExactlyMet]);
    }

    #[test]
    fn lopsided_but_two_sided_mass_stays_inside() {
        let r = assess_outcome(&[1e300, -1e-300], &OutcomeStandard::default()).unwrap();
        assert!(r.x_o < 1.0 && r.x_o > 0.999);
        assert!(x_o_from_ratio(1e200, 1.0, 3.0) < 1.0);
        assert!(x_o_from_ratio(1.0, 1e200, 3.0) > -1.0);
    }

    #[test]
    fn steepness_sharpens_the_indicator() {
        assert!(x_o_from_ratio(5.0, 1.0, 2.0) > x_o_from_ratio(5.0, 1.0, 1.0));
        assert!((x_o_from_ratio(5.0, 1.0, 2.0) - 24.0 / 26.0).abs() < 1e-15);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_ratio(&[-5.0, 25.0], 0.0).unwrap(), 1.0);
        assert_eq!(omega_ratio(&[1.0, 2.0], 0.0).unwrap(), f64::INFINITY);
        assert_eq!(omega_ratio(&[1.0, 2.0, 3.0, -1.0], 0.0).unwrap(), 3.0);
        // ties count as favorable
        assert_eq!(omega_ratio(&[0.0, -1.0], 0.0).unwrap(), 1.0);
    }

    #[test]
    fn empty_samples_are_rejected() {
        assert_eq!(upm_lpm(&[], 0.0, 1), Err(OutcomeError::EmptySamples));
        assert_eq!(omega_ratio(&[], 0.0), Err(OutcomeError::EmptySamples));
        assert!(cpt_value(&[], &identity_cpt(0.0)).is_err());
    }

    #[test]
    fn goa_worked_example() {
        let d = DiscreteOutcomeDist::new(vec![-2, 0, 1, 3], vec![0.25; 4]).unwrap();
        let r = goa(&d, 0, 1.0).unwrap();
        assert_eq!((r.upm, r.lpm), (1.75, 0.5));
        assert_eq!(r.ratio(), Some(3.5));
        assert!((r.x_o - 2.5 / 4.5).abs() < 1e-15);
    }

    #[test]
    fn goa_edge_cases() {
        let at = DiscreteOutcomeDist::new(vec![0], vec![1.0]).unwrap();
        assert_eq!(goa(&at, 0, 1.0).unwrap().x_o, 1.0);
        let below = DiscreteOutcomeDist::new(vec![-3, -1], vec![0.5, 0.5]).unwrap();
        assert_eq!(goa(&below, 0, 1.0).unwrap().x_o, -1.0);
        assert!(goa(&below, 5, 1.0).is_err());
        assert!(DiscreteOutcomeDist::new(vec![1, 1], vec![0.5, 0.5]).is_err());
        assert!(DiscreteOutcomeDist::new(vec![1, 2], vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn cpt_identity_is_the_mean() {
        let s = [3.0, -1.0, 7.0, 7.0, 2.0];
        let mean = s.iter().sum::<f64>() / 5.0;
        for bound in [-10.0, 2.0, 3.0, 100.0] {
            assert!((cpt_value(&s, &identity_cpt(bound)).unwrap() - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn cpt_linear_value_scales() {
        let s = [3.0, -1.0, 8.0];
        let spec = CptSpec::new(|z: f64| 2.0 * z, |p: f64| p, 0.0, 0.0).unwrap();
        assert!((cpt_value(&s, &spec).unwrap() - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cpt_loss_aversion_on_two_atoms() {
        let spec = CptSpec::new(|z: f64| if z >= 0.0 { z } else { 2.25 * z }, |p: f64| p, 0.0, 0.0).unwrap();
        // direct sum over the two-atom CDF: 0.5·(−22.5) + 0.5·10
        assert_eq!(cpt_value(&[10.0, -10.0], &spec).unwrap(), -6.25);
        assert!(CptSpec::new(|z: f64| z, |p: f64| p, 1.0, 0.0).is_err());
    }

    #[test]
    fn profile_is_sorted_and_saturates() {
        let s = [-3.0, 1.0, 4.0];
        let p = confidence_profile(&s, &[10.0, -10.0, 0.0], 1, 1.0).unwrap();
        assert_eq!(p.iter().map(|e| e.0).collect::<Vec<_>>(), vec![-10.0, 0.0, 10.0]);
        assert_eq!(p[0].1, 1.0);
        assert_eq!(p[2].1, -1.0);
        assert_eq!(confidence_profile(&s, &[], 1, 1.0), Err(OutcomeError::EmptyGrid));
    }
}
