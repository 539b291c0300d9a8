mod common;

use funwill_core::distribution::{
    classify_regime, entropy_gradient, exercise_will, kl_divergence, total_variation,
    unpredictability,
};
use funwill_core::quantum::{build_povm, check_completeness, outcome_distribution, prepare_state};
use funwill_core::stats::special::chi_squared_sf;
use funwill_core::stats::{apply_noise, NoiseLevel};
use funwill_core::{ProbabilityVector, Regime, WillStrength};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{pv, will};

fn prob_vector(max_len: usize, min_weight: f64) -> impl Strategy<Value = ProbabilityVector> {
    prop::collection::vec(min_weight..1.0f64, 1..=max_len)
        .prop_map(|w| ProbabilityVector::new(w, true).unwrap())
}

fn pair(min_weight: f64) -> impl Strategy<Value = (ProbabilityVector, ProbabilityVector)> {
    (1usize..=6).prop_flat_map(move |n| {
        (
            prop::collection::vec(min_weight..1.0f64, n),
            prop::collection::vec(0.0..1.0f64, n),
        )
            .prop_filter("guidance needs mass", |(_, u)| u.iter().sum::<f64>() > 1e-6)
            .prop_map(|(p, u)| {
                (ProbabilityVector::new(p, true).unwrap(), ProbabilityVector::new(u, true).unwrap())
            })
    })
}

fn sigma() -> impl Strategy<Value = WillStrength> {
    (0.0..=1.0f64).prop_map(|s| WillStrength::new(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn distortion_is_a_distribution((p, u) in pair(0.0), s in sigma()) {
        let q = exercise_will(&p, &u, s).unwrap();
        prop_assert!((q.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(q.weights().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn distortion_endpoints_are_exact((p, u) in pair(0.0)) {
        prop_assert_eq!(exercise_will(&p, &u, WillStrength::NONE).unwrap(), p.clone());
        prop_assert_eq!(exercise_will(&p, &u, WillStrength::FULL).unwrap(), u);
    }

    #[test]
    fn distance_to_guidance_shrinks_linearly((p, u) in pair(0.0), s in sigma()) {
        let q = exercise_will(&p, &u, s).unwrap();
        let lhs = total_variation(&q, &u).unwrap();
        let rhs = (1.0 - s.value()) * total_variation(&p, &u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn gradient_matches_finite_difference((p, u) in pair(0.0), s in 0.001..0.999f64) {
        let q = exercise_will(&p, &u, will(s)).unwrap();
        prop_assume!(q.weights().iter().all(|&x| x > 1e-3));
        let h = 1e-6;
        let lo = s - h;
        let hi = s + h;
        let lo_q = exercise_will(&p, &u, will(lo)).unwrap();
        let hi_q = exercise_will(&p, &u, will(hi)).unwrap();
        let fd = (unpredictability(&hi_q) - unpredictability(&lo_q)) / (hi - lo);
        let g = entropy_gradient(&p, &u, will(s)).unwrap();
        prop_assert!((g - fd).abs() <= 1e-5, "analytic {} vs fd {}", g, fd);
    }

    #[test]
    fn entropy_bounds_and_symmetry(p in prob_vector(8, 0.0)) {
        let h = unpredictability(&p);
        let n = p.len() as f64;
        prop_assert!(h >= 0.0 && h <= n.log2() + 1e-12);
        let mut rev = p.weights().to_vec();
        rev.reverse();
        let hr = unpredictability(&ProbabilityVector::new(rev, false).unwrap());
        prop_assert!((h - hr).abs() <= 1e-12);
        let uniform = ProbabilityVector::uniform(p.len()).unwrap();
        prop_assert!((unpredictability(&uniform) - n.log2()).abs() <= 1e-12);
    }

    #[test]
    fn distances_are_well_behaved((a, b) in (1usize..=5).prop_flat_map(|n| (
        prop::collection::vec(0.0..1.0f64, n),
        prop::collection::vec(0.01..1.0f64, n),
    )).prop_filter("mass", |(a, _)| a.iter().sum::<f64>() > 0.0)) {
        let a = ProbabilityVector::new(a, true).unwrap();
        let b = ProbabilityVector::new(b, true).unwrap();
        let tv = total_variation(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&tv));
        prop_assert_eq!(tv, total_variation(&b, &a).unwrap());
        let kl = kl_divergence(&a, &b).unwrap();
        prop_assert!(kl >= 0.0 && kl.is_finite());
    }

    #[test]
    fn quantum_matches_classical((p, u) in pair(1e-3), s in sigma()) {
        let povm = build_povm(&p, &u, s).unwrap();
        let state = prepare_state(&p);
        prop_assert!(check_completeness(&povm, &state).unwrap() < 1e-9);
        let quantum = outcome_distribution(&povm, &state).unwrap();
        let classical = exercise_will(&p, &u, s).unwrap();
        for (a, b) in quantum.weights().iter().zip(classical.weights()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn zero_will_recovers_born_rule((p, u) in pair(0.0)) {
        let povm = build_povm(&p, &u, WillStrength::NONE).unwrap();
        for (c, &w) in povm.coefficients().iter().zip(p.weights()) {
            prop_assert_eq!(*c, if w > 0.0 { 1.0 } else { 0.0 });
        }
        let q = outcome_distribution(&povm, &prepare_state(&p)).unwrap();
        for (a, b) in q.weights().iter().zip(p.weights()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn noise_keeps_normalization(p in prob_vector(6, 0.0), l in 0.0..=1.0f64) {
        let q = apply_noise(&p, NoiseLevel::new(l).unwrap());
        prop_assert!((q.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(q.weights().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn chi_squared_tail_matches_statrs(x in 0.0..300.0f64, dof in 1u32..60) {
        let ours = chi_squared_sf(x, dof);
        let reference = ChiSquared::new(f64::from(dof)).unwrap().sf(x);
        let scale = reference.max(1e-280);
        prop_assert!((ours - reference).abs() <= 1e-8 * scale + 1e-300,
            "x={} dof={} ours={} statrs={}", x, dof, ours, reference);
    }

    #[test]
    fn vector_json_round_trip(p in prob_vector(6, 0.0)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: ProbabilityVector = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn regime_flips_at_one_half() {
    let p = pv(&[0.0, 1.0]);
    let u = pv(&[1.0, 0.0]);
    for k in 1..100 {
        let s = k as f64 / 100.0;
        let r = classify_regime(&p, &u, will(s)).unwrap();
        let expected = match k {
            1..=49 => Regime::UncertaintyIncreasing,
            50 => Regime::Stationary,
            _ => Regime::CertaintyIncreasing,
        };
        assert_eq!(r, expected, "sigma {s}");
    }
}
