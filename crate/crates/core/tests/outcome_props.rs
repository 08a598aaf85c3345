use famsec_core::outcome::{
    assess_outcome, cpt_value, goa, identity_cpt, x_o_from_ratio, DiscreteOutcomeDist, OutcomeStandard,
};
use proptest::prelude::*;

fn x_o(samples: &[f64], z_star: f64, alpha: u32, k: f64) -> f64 {
    assess_outcome(samples, &OutcomeStandard::new(z_star, alpha, k).unwrap()).unwrap().x_o
}

fn int_samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-1000i32..1000).prop_map(f64::from), 1..60)
}

proptest! {
    #[test]
    fn x_o_is_in_range_and_extreme_only_when_one_sided(
        samples in prop::collection::vec(-1e4f64..1e4, 1..80),
        z_star in -1e4f64..1e4,
        alpha in 0u32..4,
        k in 0.1f64..5.0,
    ) {
        let r = assess_outcome(&samples, &OutcomeStandard::new(z_star, alpha, k).unwrap()).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r.x_o));
        if r.x_o == 1.0 {
            prop_assert!(r.lpm == 0.0 && r.upm > 0.0);
        }
        if r.x_o == -1.0 {
            prop_assert!(r.upm == 0.0 && r.lpm > 0.0);
        }
    }

    #[test]
    fn x_o_weakly_decreases_in_z_star(samples in int_samples(), a in -1500i32..1500, step in 1i32..500) {
        let lo = f64::from(a);
        let hi = f64::from(a + step);
        prop_assert!(x_o(&samples, hi, 1, 1.0) <= x_o(&samples, lo, 1, 1.0));
    }

    #[test]
    fn x_o_is_shift_invariant(samples in int_samples(), z in -1000i32..1000, c in -10_000i32..10_000, alpha in 0u32..4) {
        let c = f64::from(c);
        let shifted: Vec<f64> = samples.iter().map(|v| v + c).collect();
        prop_assert_eq!(x_o(&shifted, f64::from(z) + c, alpha, 1.0), x_o(&samples, f64::from(z), alpha, 1.0));
    }

    #[test]
    fn x_o_is_positive_scale_invariant(samples in int_samples(), z in -1000i32..1000, e in -8i32..8, alpha in 0u32..4) {
        let c = 2f64.powi(e);
        let scaled: Vec<f64> = samples.iter().map(|v| v * c).collect();
        prop_assert_eq!(x_o(&scaled, f64::from(z) * c, alpha, 1.0), x_o(&samples, f64::from(z), alpha, 1.0));
    }

    #[test]
    fn x_o_mirror_is_antisymmetric(samples in int_samples(), z in -1000i32..1000) {
        let z = f64::from(z) + 0.5;
        let mirrored: Vec<f64> = samples.iter().map(|v| -v).collect();
        prop_assert_eq!(x_o(&mirrored, -z, 1, 1.0), -x_o(&samples, z, 1, 1.0));
    }

    #[test]
    fn goa_equals_brute_force_sum(
        weights in prop::collection::vec(1u32..100, 1..12),
        first in -20i64..20,
        offset in -1i64..13,
        k in 0.25f64..4.0,
    ) {
        let z_star = first + offset.min(weights.len() as i64);
        let classes: Vec<i64> = (0..weights.len() as i64).map(|i| first + i).collect();
        let total: u32 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|&w| f64::from(w) / f64::from(total)).collect();
        let dist = DiscreteOutcomeDist::new(classes.clone(), probs.clone()).unwrap();
        let r = goa(&dist, z_star, k).unwrap();
        let mut up = 0.0;
        let mut down = 0.0;
        for (&z, &p) in classes.iter().zip(&probs) {
            if z >= z_star {
                up += (z - z_star + 1) as f64 * p;
            } else {
                down += (z_star - z) as f64 * p;
            }
        }
        prop_assert_eq!(r.upm, up);
        prop_assert_eq!(r.lpm, down);
        prop_assert_eq!(r.x_o, x_o_from_ratio(up, down, k));
    }

    #[test]
    fn identity_cpt_is_the_sample_mean(samples in prop::collection::vec(-1e3f64..1e3, 1..80), bound in -1e3f64..1e3) {
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let v = cpt_value(&samples, &identity_cpt(bound)).unwrap();
        prop_assert!((v - mean).abs() <= 1e-12 * mean.abs().max(1.0), "{} vs {}", v, mean);
    }
}
