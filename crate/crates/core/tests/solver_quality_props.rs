use famsec_core::solver_quality::{hellinger2_gaussian, solver_quality, squash, GaussianSummary, SolverQualityConfig};
use proptest::prelude::*;

fn g(mu: f64, sigma: f64) -> GaussianSummary {
    GaussianSummary::new(mu, sigma)
}

fn x_s(c: GaussianSummary, t: GaussianSummary, cfg: &SolverQualityConfig) -> f64 {
    solver_quality(c, t, cfg).unwrap().x_s
}

proptest! {
    #[test]
    fn h2_is_symmetric_bounded_and_zero_only_on_equal(
        m1 in -100f64..100.0, s1 in 0.01f64..50.0, m2 in -100f64..100.0, s2 in 0.01f64..50.0,
    ) {
        let (p, q) = (g(m1, s1), g(m2, s2));
        let h = hellinger2_gaussian(p, q);
        prop_assert_eq!(h, hellinger2_gaussian(q, p));
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert_eq!(hellinger2_gaussian(p, p), 0.0);
        if p != q {
            prop_assert!(h > 0.0 || (m1 - m2).abs() < 1e-6 * s1 && (s1 - s2).abs() < 1e-6 * s1);
        }
    }

    #[test]
    fn swapped_roles_sum_to_two(
        m1 in -1000f64..1000.0, s1 in 0.0f64..500.0, m2 in -1000f64..1000.0, s2 in 0.0f64..500.0,
    ) {
        let cfg = SolverQualityConfig::new(-2000.0, 2000.0);
        prop_assert_eq!(x_s(g(m1, s1), g(m2, s2), &cfg) + x_s(g(m2, s2), g(m1, s1), &cfg), 2.0);
    }

    #[test]
    fn x_s_increases_with_candidate_mean(
        mu_t in -500f64..500.0, s_c in 1f64..300.0, s_t in 1f64..300.0, a in -900f64..900.0, d in 1f64..200.0,
    ) {
        let cfg = SolverQualityConfig::new(-1000.0, 1000.0);
        let t = g(mu_t, s_t);
        let lo = x_s(g(a, s_c), t, &cfg);
        let hi = x_s(g(a + d, s_c), t, &cfg);
        prop_assert!(lo < hi || (lo >= 2.0 - 1e-12 && hi >= 2.0 - 1e-12) || (lo <= 1e-12 && hi <= 1e-12),
            "x_s({}) = {} vs x_s({}) = {}", a, lo, a + d, hi);
    }

    #[test]
    fn widening_the_range_pulls_x_s_toward_one(
        m1 in -100f64..100.0, s1 in 1f64..50.0, m2 in -100f64..100.0, s2 in 1f64..50.0,
        widths in prop::collection::vec(200f64..1e6, 2..6),
    ) {
        let mut widths = widths;
        widths.sort_by(f64::total_cmp);
        let gaps: Vec<f64> = widths
            .iter()
            .map(|w| (x_s(g(m1, s1), g(m2, s2), &SolverQualityConfig::new(-w / 2.0, w / 2.0)) - 1.0).abs())
            .collect();
        prop_assert!(gaps.windows(2).all(|p| p[1] <= p[0]), "{:?}", gaps);
    }

    #[test]
    fn squash_is_odd_around_one(m in -3f64..3.0) {
        prop_assert_eq!(squash(m, 5.0) + squash(-m, 5.0), 2.0);
    }
}

#[test]
fn saturation_at_unit_merit() {
    assert!((squash(1.0, 5.0) - 1.987).abs() < 1e-3);
    assert!((squash(-1.0, 5.0) - 0.013).abs() < 1e-3);
}
