//! Probability vectors over a finite choice space and the algebra built on
//! them: the will-distortion law, Shannon entropy in bits, its derivative
//! with respect to will strength, and distances between distributions.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Tolerance on the sum of weights at construction.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Gradient magnitude (bits per unit will) below which a point is stationary.
pub const REGIME_TOL: f64 = 1e-9;

/// Normalized nonnegative weights over an ordered set of outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates `weights`, optionally rescaling them by their sum first.
    pub fn new(weights: Vec<f64>, normalize: bool) -> Result<Self, ModelError> {
        if weights.is_empty() {
            return Err(ModelError::Empty);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(ModelError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum == 0.0 {
            return Err(ModelError::AllZero);
        }
        if normalize {
            return Ok(Self(weights.into_iter().map(|w| w / sum).collect()));
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ModelError::NotNormalized { sum });
        }
        Ok(Self(weights))
    }

    /// Shorthand for `new(weights, false)`.
    pub fn from_weights(weights: &[f64]) -> Result<Self, ModelError> {
        Self::new(weights.to_vec(), false)
    }

    pub fn uniform(n: usize) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Empty);
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// Point mass on outcome `index` of an `n`-outcome space.
    pub fn pure(n: usize, index: usize) -> Result<Self, ModelError> {
        if index >= n {
            return Err(ModelError::DimensionMismatch { left: n, right: index + 1 });
        }
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        Ok(Self(w))
    }

    /// Internal constructor for results of convex combinations of valid vectors.
    pub(crate) fn from_convex(weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|&w| w >= 0.0));
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    /// True when every weight is 0 or 1.
    pub fn is_pure(&self) -> bool {
        self.0.iter().all(|&p| p * p == p)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, _)| i)
    }

    fn check_same_len(&self, other: &Self) -> Result<(), ModelError> {
        if self.len() != other.len() {
            return Err(ModelError::DimensionMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = ModelError;

    fn try_from(weights: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(weights, false)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.0
    }
}

/// Ordered, distinct outcome names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ChoiceSpace(Vec<String>);

impl ChoiceSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(ModelError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self(labels))
    }

    /// Labels "0", "1", ..., "n-1".
    pub fn indexed(n: usize) -> Result<Self, ModelError> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn label(&self, index: usize) -> &str {
        &self.0[index]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that `p` has one weight per label.
    pub fn check(&self, p: &ProbabilityVector) -> Result<(), ModelError> {
        if self.len() != p.len() {
            return Err(ModelError::DimensionMismatch { left: self.len(), right: p.len() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<String>> for ChoiceSpace {
    type Error = ModelError;

    fn try_from(labels: Vec<String>) -> Result<Self, Self::Error> {
        Self::new(labels)
    }
}

impl From<ChoiceSpace> for Vec<String> {
    fn from(s: ChoiceSpace) -> Self {
        s.0
    }
}

/// Strength of will, a scalar in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WillStrength(f64);

impl WillStrength {
    pub const NONE: WillStrength = WillStrength(0.0);
    pub const FULL: WillStrength = WillStrength(1.0);

    pub fn new(sigma: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(ModelError::WillOutOfRange(sigma));
        }
        Ok(Self(sigma))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for WillStrength {
    type Error = ModelError;

    fn try_from(sigma: f64) -> Result<Self, Self::Error> {
        Self::new(sigma)
    }
}

impl From<WillStrength> for f64 {
    fn from(w: WillStrength) -> Self {
        w.0
    }
}

/// Sign of dH/dσ at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    CertaintyIncreasing,
    UncertaintyIncreasing,
    Stationary,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::CertaintyIncreasing => "certainty_increasing",
            Regime::UncertaintyIncreasing => "uncertainty_increasing",
            Regime::Stationary => "stationary",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Effective choice distribution `σ·P^U + (1−σ)·P`.
///
/// The endpoints are exact: `σ = 0` returns `nature` and `σ = 1` returns
/// `understanding` bit for bit.
pub fn exercise_will(
    nature: &ProbabilityVector,
    understanding: &ProbabilityVector,
    will: WillStrength,
) -> Result<ProbabilityVector, ModelError> {
    nature.check_same_len(understanding)?;
    let s = will.value();
    let weights = nature
        .weights()
        .iter()
        .zip(understanding.weights())
        .map(|(&p, &u)| s * u + (1.0 - s) * p)
        .collect();
    Ok(ProbabilityVector::from_convex(weights))
}

/// Shannon entropy in bits, with `0·log 0 = 0`.
pub fn unpredictability(dist: &ProbabilityVector) -> f64 {
    let h: f64 = dist
        .weights()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    // -0.0 and sub-ulp negatives from rounding
    h.max(0.0)
}

/// Derivative of the entropy of [`exercise_will`] with respect to σ, in bits.
///
/// Evaluates `−Σ (p^U_x − p_x)·log₂ p′_x`. The `Σ (p^U_x − p_x)/ln 2` term
/// of the full derivative vanishes because both vectors are normalized.
pub fn entropy_gradient(
    nature: &ProbabilityVector,
    understanding: &ProbabilityVector,
    will: WillStrength,
) -> Result<f64, ModelError> {
    let effective = exercise_will(nature, understanding, will)?;
    let mut acc = 0.0;
    for (index, ((&p, &u), &q)) in nature
        .weights()
        .iter()
        .zip(understanding.weights())
        .zip(effective.weights())
        .enumerate()
    {
        let d = u - p;
        if d == 0.0 {
            continue;
        }
        if q == 0.0 {
            // −d·log₂(0⁺) has the sign of d
            return Err(ModelError::DivergentGradient { index, positive: d > 0.0 });
        }
        acc += d * q.log2();
    }
    Ok(-acc)
}

/// Classifies the sign of dH/dσ with threshold [`REGIME_TOL`].
///
/// A divergent gradient is classified by the sign of its divergence.
pub fn classify_regime(
    nature: &ProbabilityVector,
    understanding: &ProbabilityVector,
    will: WillStrength,
) -> Result<Regime, ModelError> {
    let g = match entropy_gradient(nature, understanding, will) {
        Ok(g) => g,
        Err(ModelError::DivergentGradient { positive, .. }) => {
            if positive {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
        Err(e) => return Err(e),
    };
    Ok(regime_of(g))
}

pub(crate) fn regime_of(gradient: f64) -> Regime {
    if gradient < -REGIME_TOL {
        Regime::CertaintyIncreasing
    } else if gradient > REGIME_TOL {
        Regime::UncertaintyIncreasing
    } else {
        Regime::Stationary
    }
}

/// Half the L1 distance.
pub fn total_variation(a: &ProbabilityVector, b: &ProbabilityVector) -> Result<f64, ModelError> {
    a.check_same_len(b)?;
    Ok(0.5 * a.weights().iter().zip(b.weights()).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Relative entropy `D(a‖b)` in bits.
///
/// Returns `f64::INFINITY` when `a` puts weight where `b` has none.
pub fn kl_divergence(a: &ProbabilityVector, b: &ProbabilityVector) -> Result<f64, ModelError> {
    a.check_same_len(b)?;
    let mut d = 0.0;
    for (&x, &y) in a.weights().iter().zip(b.weights()) {
        if x == 0.0 {
            continue;
        }
        if y == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += x * (x / y).log2();
    }
    Ok(d.max(0.0))
}
