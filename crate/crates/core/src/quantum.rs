//! Directed collapse through a state-dependent diagonal POVM.
//!
//! Nature's distribution is loaded into a superposition with amplitudes
//! `√p_j`. The will then prepares measurement operators
//! `M_j = c_j |j⟩⟨j|` with `c_j = √((σ p^U_j + (1−σ) p_j) / p_j)`, which are
//! complete only against that particular state. Measuring yields outcome
//! `j` with probability `(c_j a_j)²`, which reproduces the classical
//! distorted distribution, and leaves the system in `|j⟩`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{exercise_will, ProbabilityVector, WillStrength};
use crate::error::ModelError;

/// Tolerance on Σ a_j² for a valid state.
pub const STATE_TOL: f64 = 1e-12;

/// Largest completeness residual accepted before measuring.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Real nonnegative amplitudes over the computational basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    amplitudes: Vec<f64>,
}

impl AmplitudeState {
    pub fn new(amplitudes: Vec<f64>) -> Result<Self, ModelError> {
        if amplitudes.is_empty() {
            return Err(ModelError::Empty);
        }
        if let Some(a) = amplitudes.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(ModelError::InvalidState(format!("amplitude {a} is not a finite nonnegative real")));
        }
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(ModelError::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// The basis vector `|index⟩` in an `n`-dimensional space.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![0.0; n];
        amplitudes[index] = 1.0;
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Index of the unit amplitude, if the state is a basis vector.
    pub fn basis_index(&self) -> Option<usize> {
        let mut found = None;
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if a == 1.0 && found.is_none() {
                found = Some(i);
            } else if a != 0.0 {
                return None;
            }
        }
        found
    }
}

/// The distribution and will a [`PovmSet`] was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub nature: ProbabilityVector,
    pub understanding: ProbabilityVector,
    pub will: WillStrength,
}

/// Diagonal measurement operators, stored as one coefficient per outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmSet {
    coefficients: Vec<f64>,
    provenance: Option<Provenance>,
}

impl PovmSet {
    /// All coefficients 1: the projective measurement in the basis.
    pub fn projective(n: usize) -> Self {
        Self { coefficients: vec![1.0; n], provenance: None }
    }

    /// Arbitrary nonnegative coefficients with no recorded provenance.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self, ModelError> {
        if coefficients.is_empty() {
            return Err(ModelError::Empty);
        }
        if let Some((index, &value)) =
            coefficients.iter().enumerate().find(|(_, c)| !c.is_finite() || **c < 0.0)
        {
            return Err(ModelError::NegativeWeight { index, value });
        }
        Ok(Self { coefficients, provenance: None })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The state this set was built to be complete against, if known.
    pub fn intended_state(&self) -> Option<AmplitudeState> {
        self.provenance.as_ref().map(|p| prepare_state(&p.nature))
    }
}

/// Outcome of one directed collapse.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOutcome {
    pub index: usize,
    pub post_state: AmplitudeState,
}

/// `|Ψ⟩ = Σ_j √p_j |j⟩`.
pub fn prepare_state(nature: &ProbabilityVector) -> AmplitudeState {
    AmplitudeState { amplitudes: nature.weights().iter().map(|p| p.sqrt()).collect() }
}

/// Builds the will-directed measurement for `prepare_state(nature)`.
///
/// Outcomes outside Nature's support get `c_j = 0`. If the will is nonzero
/// and the guidance puts weight on such an outcome, no diagonal operator
/// can move amplitude there and the build fails.
pub fn build_povm(
    nature: &ProbabilityVector,
    understanding: &ProbabilityVector,
    will: WillStrength,
) -> Result<PovmSet, ModelError> {
    let target = exercise_will(nature, understanding, will)?;
    let mut coefficients = Vec::with_capacity(nature.len());
    for (index, ((&p, &u), &q)) in nature
        .weights()
        .iter()
        .zip(understanding.weights())
        .zip(target.weights())
        .enumerate()
    {
        if p > 0.0 {
            coefficients.push((q / p).sqrt());
        } else if will.value() > 0.0 && u > 0.0 {
            return Err(ModelError::UnreachableGuidance { index });
        } else {
            coefficients.push(0.0);
        }
    }
    Ok(PovmSet {
        coefficients,
        provenance: Some(Provenance {
            nature: nature.clone(),
            understanding: understanding.clone(),
            will,
        }),
    })
}

fn check_dims(povm: &PovmSet, state: &AmplitudeState) -> Result<(), ModelError> {
    if povm.len() != state.len() {
        return Err(ModelError::DimensionMismatch { left: povm.len(), right: state.len() });
    }
    Ok(())
}

/// `|Σ_j ⟨Ψ|M_j†M_j|Ψ⟩ − 1|`.
pub fn check_completeness(povm: &PovmSet, state: &AmplitudeState) -> Result<f64, ModelError> {
    check_dims(povm, state)?;
    let total: f64 = povm
        .coefficients
        .iter()
        .zip(&state.amplitudes)
        .map(|(c, a)| (c * a) * (c * a))
        .sum();
    Ok((total - 1.0).abs())
}

/// Outcome probabilities `(c_j a_j)²`, after confirming completeness.
pub fn outcome_distribution(
    povm: &PovmSet,
    state: &AmplitudeState,
) -> Result<ProbabilityVector, ModelError> {
    let residual = check_completeness(povm, state)?;
    if residual > COMPLETENESS_TOL {
        return Err(ModelError::IncompletePovm { residual });
    }
    let raw: Vec<f64> = povm
        .coefficients
        .iter()
        .zip(&state.amplitudes)
        .map(|(c, a)| (c * a) * (c * a))
        .collect();
    ProbabilityVector::new(raw, true)
}

/// Inverse-CDF sampler over the outcome distribution of a complete POVM.
///
/// Use this when collapsing the same state many times; [`collapse`] builds
/// one per call.
#[derive(Debug, Clone)]
pub struct CollapseSampler {
    cumulative: Vec<f64>,
    last_support: usize,
}

impl CollapseSampler {
    pub fn new(povm: &PovmSet, state: &AmplitudeState) -> Result<Self, ModelError> {
        let dist = outcome_distribution(povm, state)?;
        Ok(Self::from_distribution(&dist))
    }

    pub fn from_distribution(dist: &ProbabilityVector) -> Self {
        let mut acc = 0.0;
        let cumulative = dist
            .weights()
            .iter()
            .map(|q| {
                acc += q;
                acc
            })
            .collect();
        let last_support = dist.support().last().unwrap_or(0);
        Self { cumulative, last_support }
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Draws an outcome index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        // First index whose cumulative mass exceeds u; zero-mass outcomes
        // share their predecessor's cumulative value and are never chosen.
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.last_support)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CollapseOutcome {
        let index = self.sample_index(rng);
        CollapseOutcome { index, post_state: AmplitudeState::basis(self.len(), index) }
    }
}

/// Applies the POVM to `state` once: draws `j` with probability
/// `⟨Ψ|M_j†M_j|Ψ⟩` and returns the normalized post-measurement state.
pub fn collapse<R: Rng + ?Sized>(
    povm: &PovmSet,
    state: &AmplitudeState,
    rng: &mut R,
) -> Result<CollapseOutcome, ModelError> {
    Ok(CollapseSampler::new(povm, state)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn pv(w: &[f64]) -> ProbabilityVector {
        ProbabilityVector::from_weights(w).unwrap()
    }

    fn will(s: f64) -> WillStrength {
        WillStrength::new(s).unwrap()
    }

    #[test]
    fn prepare_state_examples() {
        assert_eq!(prepare_state(&pv(&[1.0, 0.0])).amplitudes(), &[1.0, 0.0]);
        let s = prepare_state(&pv(&[0.5, 0.5]));
        assert!((s.amplitudes()[0] - 0.5f64.sqrt()).abs() < 1e-15);
        let s = prepare_state(&pv(&[0.25, 0.25, 0.5]));
        assert_eq!(&s.amplitudes()[..2], &[0.5, 0.5]);
        assert!((s.amplitudes()[2] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(AmplitudeState::new(s.amplitudes().to_vec()).is_ok());
    }

    #[test]
    fn state_validation() {
        assert!(AmplitudeState::new(vec![0.6, 0.8]).is_ok());
        assert!(AmplitudeState::new(vec![0.6, 0.7]).is_err());
        assert!(AmplitudeState::new(vec![-0.6, 0.8]).is_err());
    }

    #[test]
    fn zero_will_is_projective() {
        let p = pv(&[0.2, 0.0, 0.8]);
        let povm = build_povm(&p, &pv(&[0.0, 1.0, 0.0]), will(0.0)).unwrap();
        assert_eq!(povm.coefficients(), &[1.0, 0.0, 1.0]);
        assert_eq!(outcome_distribution(&povm, &prepare_state(&p)).unwrap(), p);
    }

    #[test]
    fn build_povm_example() {
        let povm = build_povm(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), will(0.5)).unwrap();
        assert!((povm.coefficients()[0] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((povm.coefficients()[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((povm.coefficients()[0] - 1.224_744_871_391_589).abs() < 1e-12);
    }

    #[test]
    fn unreachable_guidance_is_rejected() {
        let e = build_povm(&pv(&[0.0, 1.0]), &pv(&[1.0, 0.0]), will(0.5));
        assert_eq!(e, Err(ModelError::UnreachableGuidance { index: 0 }));
    }

    #[test]
    fn completeness_is_state_dependent() {
        let povm = build_povm(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), will(0.5)).unwrap();
        let own = povm.intended_state().unwrap();
        assert!(check_completeness(&povm, &own).unwrap() < 1e-9);
        let other = prepare_state(&pv(&[0.9, 0.1]));
        let r = check_completeness(&povm, &other).unwrap();
        assert!((r - 0.4).abs() < 1e-12);
        assert!(matches!(
            outcome_distribution(&povm, &other),
            Err(ModelError::IncompletePovm { .. })
        ));
        assert!(matches!(
            collapse(&povm, &other, &mut stream(1, 0)),
            Err(ModelError::IncompletePovm { .. })
        ));
    }

    #[test]
    fn projective_against_any_state() {
        let s = AmplitudeState::new(vec![0.6, 0.8]).unwrap();
        assert!(check_completeness(&PovmSet::projective(2), &s).unwrap() < 1e-15);
        assert!(matches!(
            check_completeness(&PovmSet::projective(3), &s),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn outcome_distribution_examples() {
        let p = pv(&[0.5, 0.5]);
        let povm = build_povm(&p, &pv(&[1.0, 0.0]), will(1.0)).unwrap();
        let q = outcome_distribution(&povm, &prepare_state(&p)).unwrap();
        assert!((q.get(0) - 1.0).abs() < 1e-15 && q.get(1) == 0.0);

        // qubit with |α|² = 0.3 and no will
        let p = pv(&[0.3, 0.7]);
        let povm = build_povm(&p, &pv(&[1.0, 0.0]), will(0.0)).unwrap();
        let q = outcome_distribution(&povm, &prepare_state(&p)).unwrap();
        assert!((q.get(0) - 0.3).abs() < 1e-15);

        let p = pv(&[0.25, 0.25, 0.5]);
        let u = pv(&[0.5, 0.5, 0.0]);
        let povm = build_povm(&p, &u, will(0.5)).unwrap();
        let q = outcome_distribution(&povm, &prepare_state(&p)).unwrap();
        let classical = exercise_will(&p, &u, will(0.5)).unwrap();
        for (a, b) in q.weights().iter().zip(classical.weights()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in q.weights().iter().zip([0.375, 0.375, 0.25]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_collapse() {
        let p = pv(&[0.5, 0.5]);
        let povm = build_povm(&p, &pv(&[1.0, 0.0]), will(1.0)).unwrap();
        let state = prepare_state(&p);
        let mut rng = stream(3, 0);
        for _ in 0..1000 {
            let out = collapse(&povm, &state, &mut rng).unwrap();
            assert_eq!(out.index, 0);
            assert_eq!(out.post_state.amplitudes(), &[1.0, 0.0]);
        }
    }

    #[test]
    fn fair_collapse_frequency() {
        let p = pv(&[0.5, 0.5]);
        let povm = PovmSet::projective(2);
        let sampler = CollapseSampler::new(&povm, &prepare_state(&p)).unwrap();
        let mut rng = stream(20_240_601, 0);
        let n = 100_000;
        let zeros = (0..n).filter(|_| sampler.sample_index(&mut rng) == 0).count();
        let f = zeros as f64 / n as f64;
        assert!((0.494..=0.506).contains(&f), "{f}");
    }

    #[test]
    fn never_samples_zero_mass() {
        let p = pv(&[0.0, 0.5, 0.0, 0.5, 0.0]);
        let sampler = CollapseSampler::new(&PovmSet::projective(5), &prepare_state(&p)).unwrap();
        let mut rng = stream(9, 0);
        for _ in 0..10_000 {
            let out = sampler.sample(&mut rng);
            assert!(out.index == 1 || out.index == 3);
            assert_eq!(out.post_state.basis_index(), Some(out.index));
        }
    }
}
