//! Property-based invariants over random parameters.

use aign_core::capacity::{capacity_lower_bound, capacity_upper_bound};
use aign_core::ig::{combine_additive, IgParams};
use aign_core::receiver::{llr, log_likelihood, ml_estimate};
use proptest::prelude::*;

fn scale() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cdf_is_a_distribution_function(mu in scale(), lambda in scale(), a in 0.0f64..50.0, da in 0.0f64..50.0) {
        let p = IgParams::new(mu, lambda).unwrap();
        let (fa, fb) = (p.cdf(a), p.cdf(a + da));
        prop_assert!((0.0..=1.0).contains(&fa) && (0.0..=1.0).contains(&fb));
        prop_assert!(fb >= fa - 1e-15);
        prop_assert!((p.cdf(a) + p.sf(a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_is_finite_and_non_negative(mu in scale(), lambda in scale(), n in -10.0f64..1e3) {
        let f = IgParams::new(mu, lambda).unwrap().pdf(n);
        prop_assert!(f.is_finite() && f >= 0.0);
    }

    #[test]
    fn samples_respect_the_shift(mu in scale(), lambda in scale(), shift in 0.0f64..10.0, seed in any::<u64>()) {
        let p = IgParams::shifted(mu, lambda, shift).unwrap();
        prop_assert!(p.sample(16, seed).iter().all(|&x| x > shift && x.is_finite()));
    }

    #[test]
    fn entropy_below_gaussian_with_same_variance(mu in scale(), lambda in scale()) {
        let p = IgParams::new(mu, lambda).unwrap();
        let gauss = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * p.variance()).ln();
        let h = p.entropy().unwrap();
        prop_assert!(h < gauss);
        prop_assert!((h - p.entropy_closed_form()).abs() < 1e-9 * (1.0 + h.abs()));
    }

    #[test]
    fn bounds_are_ordered_and_increase_in_m(mu in scale(), lambda in scale(), m in 0.01f64..10.0) {
        let p = IgParams::new(mu, lambda).unwrap();
        let (lo, up) = (capacity_lower_bound(m, &p).unwrap(), capacity_upper_bound(m, &p).unwrap());
        prop_assert!(lo >= -1e-12 && lo <= up + 1e-12);
        prop_assert!(capacity_upper_bound(2.0 * m, &p).unwrap() > up);
    }

    #[test]
    fn ml_estimate_precedes_the_arrival(mu in scale(), lambda in scale(), y in 0.01f64..100.0) {
        let p = IgParams::new(mu, lambda).unwrap();
        let t = ml_estimate(y, &p);
        prop_assert!(t < y && y - t < mu);
    }

    #[test]
    fn llr_is_a_likelihood_difference(mu in scale(), lambda in scale(), t1 in 0.0f64..5.0, gap in 0.01f64..5.0, dy in 0.001f64..20.0) {
        let p = IgParams::new(mu, lambda).unwrap();
        let t2 = t1 + gap;
        let y = t2 + dy;
        let direct = log_likelihood(t2, y, &p) - log_likelihood(t1, y, &p);
        prop_assert!((llr(y, t1, t2, &p) - direct).abs() < 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn averaging_identical_laws(mu in scale(), lambda in scale(), m in 1usize..16) {
        let p = IgParams::new(mu, lambda).unwrap();
        let parts: Vec<_> = (0..m).map(|_| (1.0 / m as f64, p)).collect();
        let z = combine_additive(&parts).unwrap();
        prop_assert!((z.mu() - mu).abs() < 1e-12 * mu);
        prop_assert!((z.lambda() - m as f64 * lambda).abs() < 1e-9 * m as f64 * lambda);
    }
}
