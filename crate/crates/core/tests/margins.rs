mod common;

use domargin::margins::{disk_margin_check, gain_margins, hinf_lambda_norm, open_loop_degree, phase_margins, Disk};
use domargin::nyquist::{clockwise_encirclements, sample_curve, winding_number, SampleOptions};
use domargin::RationalTransferFunction;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn system(seed: u64) -> (RationalTransferFunction, f64) {
    common::random_system(&mut ChaCha8Rng::seed_from_u64(seed), 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn far_points_are_not_encircled(seed in any::<u64>(), angle in 0.0f64..6.28, r in 2.01f64..10.0) {
        let (w, lambda) = system(seed);
        let curve = sample_curve(&w, lambda, &SampleOptions::default()).unwrap();
        let q = Complex64::from_polar(r * curve.scale, angle);
        prop_assert_eq!(winding_number(&curve, q).unwrap(), 0);
    }

    #[test]
    fn unrotated_count_keeps_zero_in_phase_set(seed in any::<u64>(), k_exp in -1.5f64..1.5, neg in any::<bool>()) {
        let (w, lambda) = system(seed);
        let k = 10f64.powf(k_exp) * if neg { -1.0 } else { 1.0 };
        let curve = sample_curve(&w, lambda, &SampleOptions::default()).unwrap();
        let point = Complex64::new(-1.0 / k, 0.0);
        prop_assume!(curve.distance_to(point) > 1e-4 * curve.scale);
        let p1 = open_loop_degree(&w, lambda).unwrap() as i64;
        let p2 = p1 + clockwise_encirclements(&curve, point).unwrap();
        let report = phase_margins(&w, lambda, k, p2).unwrap();
        prop_assert!(report.contains(0.0));
    }

    #[test]
    fn disk_margin_implies_gain_margin(seed in any::<u64>(), a in -3.0f64..3.0, width in 0.05f64..2.0) {
        let (w, lambda) = system(seed);
        // Bounded disk [-1/k1, -1/k2] on the negative or positive real axis.
        let (x1, x2) = (a, a + width);
        prop_assume!(x1 * x2 > 0.0);
        let (k1, k2) = ((-1.0 / x1).min(-1.0 / x2), (-1.0 / x1).max(-1.0 / x2));
        let disk = Disk::new(k1, k2).unwrap();
        let p1 = open_loop_degree(&w, lambda).unwrap() as i64;
        for p2 in p1 - 2..=p1 + 2 {
            let r = disk_margin_check(&w, lambda, &disk, p2).unwrap();
            if r.holds {
                let gains = gain_margins(&w, lambda).unwrap();
                let iv = gains.interval_containing(0.5 * (k1 + k2)).unwrap();
                prop_assert!(iv.lo <= k1 && k2 <= iv.hi && iv.p2 == p2, "{:?} vs ({}, {})", iv, k1, k2);
            }
        }
    }

    #[test]
    fn norm_bounds_the_curve(seed in any::<u64>()) {
        let (w, lambda) = system(seed);
        let norm = hinf_lambda_norm(&w, lambda).unwrap();
        let curve = sample_curve(&w, lambda, &SampleOptions::default()).unwrap();
        let sampled = curve.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(norm >= sampled * (1.0 - 1e-12));
        prop_assert!(norm <= sampled * (1.0 + 1e-3) + 1e-15);
    }
}

#[test]
fn reciprocal_norm_matches_gain_endpoint() {
    let w = RationalTransferFunction::mass_spring_damper(1.0, 5.0, 1.0).unwrap();
    let norm = hinf_lambda_norm(&w, 2.0).unwrap();
    let r = gain_margins(&w, 2.0).unwrap();
    assert!((1.0 / norm - r.intervals[0].hi).abs() < 1e-8);
}
