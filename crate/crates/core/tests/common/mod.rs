#![allow(dead_code)]

use funwill_core::rng::{stream, Stream};
use funwill_core::{ProbabilityVector, WillStrength};
use rand::Rng;

/// Flat-Dirichlet draw over `n` outcomes; with `sparse`, each weight is
/// zeroed with probability 0.3 (at least one survives).
pub fn random_vector(rng: &mut Stream, n: usize, sparse: bool) -> ProbabilityVector {
    let keep = rng.random_range(0..n);
    let w: Vec<f64> = (0..n)
        .map(|j| {
            if sparse && j != keep && rng.random_bool(0.3) {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln() + 1e-12
            }
        })
        .collect();
    ProbabilityVector::new(w, true).unwrap()
}

pub struct Triple {
    pub nature: ProbabilityVector,
    pub understanding: ProbabilityVector,
    pub will: WillStrength,
}

/// Random (P, P^U, σ) with strictly positive P, 2..=6 outcomes.
pub fn random_triples(seed: u64, count: usize) -> Vec<Triple> {
    let mut rng = stream(seed, 0);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=6);
            Triple {
                nature: random_vector(&mut rng, n, false),
                understanding: random_vector(&mut rng, n, true),
                will: WillStrength::new(rng.random::<f64>()).unwrap(),
            }
        })
        .collect()
}

pub fn will(s: f64) -> WillStrength {
    WillStrength::new(s).unwrap()
}

pub fn pv(w: &[f64]) -> ProbabilityVector {
    ProbabilityVector::from_weights(w).unwrap()
}
