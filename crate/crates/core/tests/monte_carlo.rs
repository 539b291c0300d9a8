mod common;

use funwill_core::distribution::exercise_will;
use funwill_core::quantum::{build_povm, outcome_distribution, prepare_state, CollapseSampler};
use funwill_core::rng::stream;
use funwill_core::stats::{
    chi_squared_test, detection_power, lln_concentration, simulate_trials_on_stream, NoiseLevel,
    PowerQuery, Verdict,
};
use funwill_core::WillStrength;

use common::{pv, will};

const MC_SLACK: f64 = 0.03;

fn query(s: f64, n: u64, noise: f64, seed: u64) -> PowerQuery {
    PowerQuery {
        nature: pv(&[0.5, 0.5]),
        understanding: pv(&[1.0, 0.0]),
        will: will(s),
        noise: NoiseLevel::new(noise).unwrap(),
        trials: n,
        alpha: 0.05,
        reps: 1000,
        seed,
    }
}

#[test]
fn collapse_frequencies_match_outcome_distribution() {
    let p = pv(&[0.25, 0.25, 0.5]);
    let u = pv(&[0.5, 0.5, 0.0]);
    let povm = build_povm(&p, &u, will(0.3)).unwrap();
    let state = prepare_state(&p);
    let q = outcome_distribution(&povm, &state).unwrap();
    let sampler = CollapseSampler::new(&povm, &state).unwrap();
    let n = 1_000_000u64;
    let mut counts = [0u64; 3];
    let mut rng = stream(31_337, 0);
    for _ in 0..n {
        counts[sampler.sample_index(&mut rng)] += 1;
    }
    for (j, &c) in counts.iter().enumerate() {
        let qj = q.get(j);
        let f = c as f64 / n as f64;
        let bound = 4.0 * (qj * (1.0 - qj) / n as f64).sqrt();
        assert!((f - qj).abs() <= bound, "outcome {j}: {f} vs {qj} (bound {bound})");
    }
}

#[test]
fn type_one_error_is_calibrated() {
    let rate = detection_power(&query(0.0, 1000, 0.0, 1)).unwrap();
    assert!((0.03..=0.07).contains(&rate), "{rate}");
}

#[test]
fn moderate_distortion_is_detected() {
    // P′ = (0.6, 0.4) against Born (0.5, 0.5), one test per seed
    let alt = exercise_will(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), will(0.2)).unwrap();
    assert!((alt.get(0) - 0.6).abs() < 1e-15);
    let born = pv(&[0.5, 0.5]);
    let hits = (0..1000u64)
        .filter(|&r| {
            let t = simulate_trials_on_stream(&alt, 10_000, 99, r).unwrap();
            chi_squared_test(&t, &born, 0.05).unwrap().verdict == Verdict::Deviation
        })
        .count();
    assert!(hits > 990, "{hits}");
}

#[test]
fn maximal_will_is_always_detected() {
    assert!(detection_power(&query(1.0, 100, 0.0, 2)).unwrap() >= 0.999);
}

#[test]
fn power_grows_with_sample_size() {
    let powers: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&n| detection_power(&query(0.1, n, 0.0, 3)).unwrap())
        .collect();
    for w in powers.windows(2) {
        assert!(w[1] + MC_SLACK >= w[0], "{powers:?}");
    }
    assert!(powers[2] > powers[0]);
}

#[test]
fn power_grows_with_will() {
    let powers: Vec<f64> = (0..=10)
        .map(|k| detection_power(&query(k as f64 / 10.0, 1000, 0.0, 4)).unwrap())
        .collect();
    for w in powers.windows(2) {
        assert!(w[1] + MC_SLACK >= w[0], "{powers:?}");
    }
}

#[test]
fn noise_masks_deviation() {
    for n in [500, 10_000] {
        let powers: Vec<f64> = [0.0, 0.25, 0.5]
            .iter()
            .map(|&l| detection_power(&query(0.2, n, l, 5)).unwrap())
            .collect();
        for w in powers.windows(2) {
            assert!(w[1] <= w[0] + MC_SLACK, "n={n}: {powers:?}");
        }
    }
    // below saturation the masking is strict
    let weak: Vec<f64> = [0.0, 0.25, 0.5]
        .iter()
        .map(|&l| detection_power(&query(0.2, 500, l, 6)).unwrap())
        .collect();
    assert!(weak[0] > weak[1] && weak[1] > weak[2], "{weak:?}");
}

#[test]
fn full_noise_hides_everything() {
    let q = PowerQuery { noise: NoiseLevel::new(1.0).unwrap(), ..query(1.0, 1000, 0.0, 7) };
    let power = detection_power(&q).unwrap();
    assert!((0.03..=0.07).contains(&power), "{power}");
}

#[test]
fn weak_law_concentration() {
    let coin = pv(&[0.5, 0.5]);
    let reps = 4000;
    let pts = lln_concentration(&coin, &[1.0, 0.0], 0.1, &[100, 1000, 10_000], reps, 8).unwrap();
    assert!(pts[2].estimate < pts[0].estimate);
    for w in pts.windows(2) {
        assert!(w[1].estimate <= w[0].estimate + 3.0 * w[0].std_error.max(w[1].std_error));
    }
    for p in &pts {
        assert!((p.chebyshev_bound - 0.25 / (p.n as f64 * 0.01)).abs() < 1e-12 || p.chebyshev_bound == 1.0);
        assert!(p.estimate <= p.chebyshev_bound + 3.0 * p.std_error, "{p:?}");
    }
}

#[test]
fn weak_law_on_a_biased_die() {
    // Var = 35/12 for a fair die; use a skewed one to exercise nonbinary payoffs.
    let die = pv(&[0.1, 0.1, 0.1, 0.1, 0.1, 0.5]);
    let payoff = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let pts = lln_concentration(&die, &payoff, 0.25, &[50, 200, 800], 2000, 9).unwrap();
    for p in &pts {
        assert!(p.estimate <= p.chebyshev_bound + 3.0 * p.std_error, "{p:?}");
    }
    assert!(pts[2].estimate < pts[0].estimate);
}

#[test]
fn reps_are_order_independent() {
    let q = query(0.15, 300, 0.1, 10);
    let a = detection_power(&q).unwrap();
    let b = detection_power(&q).unwrap();
    assert_eq!(a, b);
    let zero = WillStrength::NONE;
    assert_eq!(
        detection_power(&PowerQuery { will: zero, ..q.clone() }).unwrap(),
        detection_power(&PowerQuery { will: zero, ..q }).unwrap()
    );
}
