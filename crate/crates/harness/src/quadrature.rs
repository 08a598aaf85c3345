//! Adaptive Simpson quadrature and the numerical Hellinger distance used to
//! check the Gaussian closed form.

use famsec_core::solver_quality::GaussianSummary;

/// Adaptive Simpson integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn normal_pdf(x: f64, g: GaussianSummary) -> f64 {
    let z = (x - g.mu) / g.sigma;
    (-0.5 * z * z).exp() / (g.sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// `½∫(√p − √q)²` for two normal densities, integrated piecewise between
/// breakpoints placed at multiples of each standard deviation.
pub fn hellinger2_quadrature(p: GaussianSummary, q: GaussianSummary) -> f64 {
    const SPREADS: [f64; 9] = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 14.0];
    let mut cuts: Vec<f64> = [p, q]
        .iter()
        .flat_map(|g| SPREADS.iter().flat_map(move |k| [g.mu - k * g.sigma, g.mu + k * g.sigma]))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integrand = |x: f64| (normal_pdf(x, p).sqrt() - normal_pdf(x, q).sqrt()).powi(2);
    0.5 * cuts
        .windows(2)
        .map(|w| adaptive_simpson(&integrand, w[0], w[1], 1e-13))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_known_functions() {
        assert!((adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-10);
        assert!((adaptive_simpson(&|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-12) - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn quadrature_matches_hand_values() {
        let g = |mu, sigma| GaussianSummary::new(mu, sigma);
        assert!((hellinger2_quadrature(g(0.0, 1.0), g(1.0, 1.0)) - (1.0 - (-0.125f64).exp())).abs() < 1e-8);
        assert!((hellinger2_quadrature(g(0.0, 1.0), g(0.0, 2.0)) - (1.0 - 0.8f64.sqrt())).abs() < 1e-8);
        assert!(hellinger2_quadrature(g(3.0, 0.5), g(3.0, 0.5)).abs() < 1e-12);
    }
}
