//! Synthetic indicator suites: the outcome-assessment panel examples and
//! the solver-quality closed-form and fixed-point checks.

use famsec_core::outcome::{
    assess_outcome, confidence_profile, goa, omega_ratio, DiscreteOutcomeDist, OutcomeAssessmentResult,
    OutcomeStandard,
};
use famsec_core::solver_quality::{hellinger2_gaussian, solver_quality, squash, GaussianSummary, SolverQualityConfig};
use serde::Serialize;
use serde_json::json;

use super::RunOptions;
use crate::error::HarnessError;
use crate::quadrature::hellinger2_quadrature;
use crate::report::{Output, Report, Table};

/// An equal-mass outcome distribution and its expected `x_O` at `z* = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Panel {
    pub name: &'static str,
    pub atoms: &'static [f64],
    pub expected: f64,
}

/// Twelve two-sided and one-sided outcome distributions with their
/// indicator values at `z* = 0`, `α = 1`, `k = 1`.
pub const FIG4_PANELS: [Panel; 12] = [
    Panel { name: "a", atoms: &[10.0], expected: 1.0 },
    Panel { name: "b", atoms: &[-5.0, 25.0], expected: 2.0 / 3.0 },
    Panel { name: "c", atoms: &[5.0, 25.0], expected: 1.0 },
    Panel { name: "d", atoms: &[-10.0], expected: -1.0 },
    Panel { name: "e", atoms: &[5.0, -25.0], expected: -2.0 / 3.0 },
    Panel { name: "f", atoms: &[-5.0, -25.0], expected: -1.0 },
    Panel { name: "g", atoms: &[-10.0, 10.0], expected: 0.0 },
    Panel { name: "h", atoms: &[-20.0, 20.0], expected: 0.0 },
    Panel { name: "i", atoms: &[-5.0, 15.0], expected: 0.5 },
    Panel { name: "j", atoms: &[-10.0, 30.0], expected: 0.5 },
    Panel { name: "k", atoms: &[5.0, -15.0], expected: -0.5 },
    Panel { name: "l", atoms: &[10.0, -30.0], expected: -0.5 },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelResult {
    pub panel: Panel,
    pub result: OutcomeAssessmentResult,
    pub abs_error: f64,
}

/// Evaluates every panel at the default standard.
pub fn panel_suite() -> Result<Vec<PanelResult>, HarnessError> {
    FIG4_PANELS
        .iter()
        .map(|p| {
            let result = assess_outcome(p.atoms, &OutcomeStandard::default())?;
            Ok(PanelResult {
                panel: *p,
                abs_error: (result.x_o - p.expected).abs(),
                result,
            })
        })
        .collect()
}

pub(super) fn xo_output(opts: &RunOptions) -> Result<Output, HarnessError> {
    let panels = panel_suite()?;
    let max_abs_error = panels.iter().map(|p| p.abs_error).fold(0.0, f64::max);
    let panel_b = FIG4_PANELS[1].atoms;
    let omega = omega_ratio(panel_b, 0.0)?;
    let dist = DiscreteOutcomeDist::new(vec![-2, 0, 1, 3], vec![0.25; 4])?;
    let goa_example = goa(&dist, 0, 1.0)?;
    let grid: Vec<f64> = (-6..=6).map(|i| f64::from(i) * 5.0).collect();
    let profile = confidence_profile(panel_b, &grid, 1, 1.0)?;

    let mut table = Table::new("panels", &["panel", "atoms", "upm", "lpm", "x_o", "expected"]);
    for p in &panels {
        let atoms: Vec<String> = p.panel.atoms.iter().map(f64::to_string).collect();
        table.push([
            p.panel.name.to_string(),
            atoms.join(" "),
            p.result.upm.to_string(),
            p.result.lpm.to_string(),
            p.result.x_o.to_string(),
            p.panel.expected.to_string(),
        ]);
    }
    let mut profile_table = Table::new("profile", &["z_star", "x_o"]);
    for (z, x) in &profile {
        profile_table.push([z, x]);
    }
    let report = Report::new(
        "synthetic_xo",
        opts.seed,
        json!({"z_star": 0.0, "alpha": 1, "k": 1.0, "equal_mass_atoms": true}),
        json!({
            "panels": panels,
            "max_abs_error": max_abs_error,
            "omega_ratio_panel_b": omega,
            "goa_example": {"classes": dist.classes(), "probs": dist.probs(), "result": goa_example},
            "confidence_profile_panel_b": profile,
        }),
    );
    Ok(Output::new(report).with_table(table).with_table(profile_table))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraturePoint {
    pub sigma_p: f64,
    pub sigma_q: f64,
    pub delta_mu: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XsSuite {
    pub grid: Vec<QuadraturePoint>,
    pub max_quadrature_error: f64,
    /// `x_S` of identical summaries.
    pub identical_x_s: f64,
    /// `x_S(c, t) + x_S(t, c)` for the worked example.
    pub swap_sum: f64,
    pub saturation_plus: f64,
    pub saturation_minus: f64,
    pub worked_example: famsec_core::solver_quality::SolverQualityResult,
    /// `(range width, x_S)` with the worked example's summaries.
    pub range_sweep: Vec<(f64, f64)>,
}

pub const SIGMAS: [f64; 3] = [0.1, 1.0, 5.0];

pub fn xs_suite() -> Result<XsSuite, HarnessError> {
    let mut grid = Vec::new();
    for &sigma_p in &SIGMAS {
        for &sigma_q in &SIGMAS {
            for dm in -5..=5 {
                let delta_mu = f64::from(dm);
                let p = GaussianSummary::new(0.0, sigma_p);
                let q = GaussianSummary::new(delta_mu, sigma_q);
                let closed_form = hellinger2_gaussian(p, q);
                let quadrature = hellinger2_quadrature(p, q);
                grid.push(QuadraturePoint {
                    sigma_p,
                    sigma_q,
                    delta_mu,
                    closed_form,
                    quadrature,
                    abs_error: (closed_form - quadrature).abs(),
                });
            }
        }
    }
    let max_quadrature_error = grid.iter().map(|g| g.abs_error).fold(0.0, f64::max);
    let cfg = SolverQualityConfig::new(-10.0, 10.0);
    let c = GaussianSummary::new(1.0, 1.0);
    let t = GaussianSummary::new(0.0, 1.0);
    let identical_x_s = solver_quality(c, c, &cfg)?.x_s;
    let worked_example = solver_quality(c, t, &cfg)?;
    let swap_sum = worked_example.x_s + solver_quality(t, c, &cfg)?.x_s;
    let range_sweep = [20.0, 50.0, 100.0, 1000.0, 10000.0]
        .iter()
        .map(|&w| Ok((w, solver_quality(c, t, &SolverQualityConfig::new(-w / 2.0, w / 2.0))?.x_s)))
        .collect::<Result<_, HarnessError>>()?;
    Ok(XsSuite {
        grid,
        max_quadrature_error,
        identical_x_s,
        swap_sum,
        saturation_plus: squash(1.0, SolverQualityConfig::DEFAULT_GAIN),
        saturation_minus: squash(-1.0, SolverQualityConfig::DEFAULT_GAIN),
        worked_example,
        range_sweep,
    })
}

pub(super) fn xs_output(opts: &RunOptions) -> Result<Output, HarnessError> {
    let suite = xs_suite()?;
    let mut table = Table::new("quadrature", &["sigma_p", "sigma_q", "delta_mu", "closed_form", "quadrature", "abs_error"]);
    for g in &suite.grid {
        table.push([g.sigma_p, g.sigma_q, g.delta_mu, g.closed_form, g.quadrature, g.abs_error]);
    }
    let report = Report::new(
        "synthetic_xs",
        opts.seed,
        json!({
            "sigmas": SIGMAS,
            "delta_mu": (-5..=5).collect::<Vec<i32>>(),
            "kappa": SolverQualityConfig::DEFAULT_KAPPA,
            "squash_gain": SolverQualityConfig::DEFAULT_GAIN,
            "worked_example_range": [-10.0, 10.0],
        }),
        serde_json::to_value(&suite)?,
    )
    .with_flags(["delta_mu_is_candidate_minus_trusted"]);
    Ok(Output::new(report).with_table(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panels_match_to_rounding() {
        for p in panel_suite().unwrap() {
            assert!(p.abs_error <= 1e-12, "panel {}: {}", p.panel.name, p.result.x_o);
        }
    }

    #[test]
    fn xs_suite_fixed_points() {
        let s = xs_suite().unwrap();
        assert_eq!(s.grid.len(), 99);
        assert!(s.max_quadrature_error < 1e-6);
        assert_eq!(s.identical_x_s, 1.0);
        assert_eq!(s.swap_sum, 2.0);
        assert!(s.range_sweep.windows(2).all(|w| (w[1].1 - 1.0).abs() < (w[0].1 - 1.0).abs()));
    }
}
