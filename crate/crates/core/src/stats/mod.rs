//! Monte Carlo trials and Born-rule deviation tests.
//!
//! Sampled outcome counts are compared against a null distribution with a
//! Pearson chi-squared test. Repeating that over independently seeded
//! replicates estimates the type-I error rate (null true) or the power to
//! detect a will-distorted distribution, optionally with both sides mixed
//! with uniform noise.

pub mod special;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::distribution::{exercise_will, ProbabilityVector, WillStrength};
use crate::error::{ModelError, StatsError};
use crate::rng::{derive_seed, stream};

/// Expected count below which cells are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Outcome tallies from one seeded run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialCounts {
    counts: Vec<u64>,
    total: u64,
    seed: u64,
    stream: u64,
}

impl TrialCounts {
    pub fn new(counts: Vec<u64>, seed: u64, stream: u64) -> Result<Self, StatsError> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(StatsError::InvalidArgument("trial counts must total at least 1".into()));
        }
        Ok(Self { counts, total, seed, stream })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Deviation,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Deviation => "deviation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: u32,
    pub verdict: Verdict,
}

/// Weight of the uniform distribution mixed into an outcome distribution.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NoiseLevel(f64);

impl NoiseLevel {
    pub const NONE: NoiseLevel = NoiseLevel(0.0);

    pub fn new(lambda: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(ModelError::NoiseOutOfRange(lambda));
        }
        Ok(Self(lambda))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NoiseLevel {
    type Error = ModelError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<NoiseLevel> for f64 {
    fn from(n: NoiseLevel) -> Self {
        n.0
    }
}

/// `(1−λ)·dist + λ·uniform`.
pub fn apply_noise(dist: &ProbabilityVector, noise: NoiseLevel) -> ProbabilityVector {
    let l = noise.value();
    let u = 1.0 / dist.len() as f64;
    ProbabilityVector::from_convex(dist.weights().iter().map(|&p| (1.0 - l) * p + l * u).collect())
}

/// Multinomial counts of `n` draws from `dist` using the caller's stream.
///
/// Draws outcome by outcome from conditional binomials, so the cost is
/// independent of `n`.
pub fn sample_counts<R: Rng + ?Sized>(dist: &ProbabilityVector, n: u64, rng: &mut R) -> Vec<u64> {
    let w = dist.weights();
    let last = dist.support().last().unwrap_or(0);
    let mut counts = vec![0u64; w.len()];
    let mut remaining = n;
    let mut mass = 1.0;
    for (j, &p) in w.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if j == last {
            counts[j] = remaining;
            break;
        }
        if p == 0.0 {
            continue;
        }
        let cond = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, cond).expect("probability clamped to [0, 1]").sample(rng);
        counts[j] = k;
        remaining -= k;
        mass -= p;
        if mass <= 0.0 {
            // rounding ate the tail; give the rest to the last supported outcome
            counts[last] += remaining;
            break;
        }
    }
    counts
}

/// `n` seeded draws from `dist`, reproducible from `(dist, n, seed)`.
pub fn simulate_trials(dist: &ProbabilityVector, n: u64, seed: u64) -> Result<TrialCounts, StatsError> {
    simulate_trials_on_stream(dist, n, seed, 0)
}

/// As [`simulate_trials`] but on stream `stream_id` of `seed`.
pub fn simulate_trials_on_stream(
    dist: &ProbabilityVector,
    n: u64,
    seed: u64,
    stream_id: u64,
) -> Result<TrialCounts, StatsError> {
    if n == 0 {
        return Err(StatsError::InvalidArgument("number of trials must be at least 1".into()));
    }
    let counts = sample_counts(dist, n, &mut stream(seed, stream_id));
    TrialCounts::new(counts, seed, stream_id)
}

/// Pearson goodness-of-fit test of `observed` against `expected`.
///
/// Outcomes with zero expected mass are dropped, unless something was
/// observed there, in which case the statistic is infinite. Cells with
/// expected count below [`MIN_EXPECTED`] are pooled into one cell; if that
/// cell is itself still below the threshold it is merged into the smallest
/// remaining cell.
pub fn chi_squared_test(
    observed: &TrialCounts,
    expected: &ProbabilityVector,
    alpha: f64,
) -> Result<TestReport, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidAlpha(alpha));
    }
    if observed.counts.len() != expected.len() {
        return Err(ModelError::DimensionMismatch {
            left: observed.counts.len(),
            right: expected.len(),
        }
        .into());
    }
    let total = observed.total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(expected.len());
    let mut pooled = (0.0, 0.0);
    let mut impossible = false;
    for (&o, &p) in observed.counts.iter().zip(expected.weights()) {
        let e = p * total;
        let o = o as f64;
        if e == 0.0 {
            impossible |= o > 0.0;
        } else if e < MIN_EXPECTED {
            pooled.0 += o;
            pooled.1 += e;
        } else {
            cells.push((o, e));
        }
    }
    if pooled.1 > 0.0 {
        if pooled.1 < MIN_EXPECTED && !cells.is_empty() {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            smallest.0 += pooled.0;
            smallest.1 += pooled.1;
        } else {
            cells.push(pooled);
        }
    }
    if cells.len() < 2 {
        return Err(StatsError::InsufficientExpected);
    }
    let dof = (cells.len() - 1) as u32;
    let statistic = if impossible {
        f64::INFINITY
    } else {
        cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum()
    };
    let p_value = special::chi_squared_sf(statistic, dof);
    let verdict = if p_value < alpha { Verdict::Deviation } else { Verdict::Consistent };
    Ok(TestReport { statistic, p_value, dof, verdict })
}

/// One point of a detection-power estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerQuery {
    pub nature: ProbabilityVector,
    pub understanding: ProbabilityVector,
    pub will: WillStrength,
    pub noise: NoiseLevel,
    pub trials: u64,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
}

/// Fewest replicates accepted by [`detection_power`].
pub const MIN_REPS: u64 = 100;

/// Fraction of replicates in which samples from the noisy distorted
/// distribution are declared to deviate from the noisy Born distribution.
///
/// With `will = 0` this is the type-I error rate.
pub fn detection_power(q: &PowerQuery) -> Result<f64, StatsError> {
    if q.reps < MIN_REPS {
        return Err(StatsError::InvalidArgument(format!(
            "detection power needs at least {MIN_REPS} replicates, got {}",
            q.reps
        )));
    }
    if q.trials == 0 {
        return Err(StatsError::InvalidArgument("number of trials must be at least 1".into()));
    }
    let alternative = apply_noise(&exercise_will(&q.nature, &q.understanding, q.will)?, q.noise);
    let null = apply_noise(&q.nature, q.noise);
    let hits = count_hits(q.reps, |r| {
        let counts = simulate_trials_on_stream(&alternative, q.trials, q.seed, r)?;
        Ok(chi_squared_test(&counts, &null, q.alpha)?.verdict == Verdict::Deviation)
    })?;
    Ok(hits as f64 / q.reps as f64)
}

/// Number of replicates `0..reps` for which `trial` returns true.
#[cfg(feature = "parallel")]
fn count_hits<F>(reps: u64, trial: F) -> Result<u64, StatsError>
where
    F: Fn(u64) -> Result<bool, StatsError> + Sync,
{
    use rayon::prelude::*;
    (0..reps).into_par_iter().map(|r| trial(r).map(u64::from)).sum()
}

#[cfg(not(feature = "parallel"))]
fn count_hits<F>(reps: u64, trial: F) -> Result<u64, StatsError>
where
    F: Fn(u64) -> Result<bool, StatsError>,
{
    (0..reps).map(|r| trial(r).map(u64::from)).sum()
}

/// Monte Carlo estimate of `Pr(|X̄_n − μ| > ε)` at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationPoint {
    pub n: u64,
    pub estimate: f64,
    /// Standard error of `estimate`.
    pub std_error: f64,
    /// `min(1, Var/(n ε²))`.
    pub chebyshev_bound: f64,
}

/// Sample-mean concentration of `payoff` under `dist` for each `n` in
/// `n_schedule`.
pub fn lln_concentration(
    dist: &ProbabilityVector,
    payoff: &[f64],
    epsilon: f64,
    n_schedule: &[u64],
    reps: u64,
    seed: u64,
) -> Result<Vec<ConcentrationPoint>, StatsError> {
    if payoff.len() != dist.len() {
        return Err(ModelError::DimensionMismatch { left: dist.len(), right: payoff.len() }.into());
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(StatsError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if payoff.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::InvalidArgument("payoff values must be finite".into()));
    }
    if reps == 0 || n_schedule.contains(&0) {
        return Err(StatsError::InvalidArgument("reps and every n must be at least 1".into()));
    }
    let w = dist.weights();
    let mean: f64 = w.iter().zip(payoff).map(|(p, x)| p * x).sum();
    let var: f64 = w.iter().zip(payoff).map(|(p, x)| p * (x - mean) * (x - mean)).sum();
    let mut points = Vec::with_capacity(n_schedule.len());
    for (k, &n) in n_schedule.iter().enumerate() {
        let sub_seed = derive_seed(seed, k as u64);
        let hits = count_hits(reps, |r| {
            let counts = sample_counts(dist, n, &mut stream(sub_seed, r));
            let centered: f64 = counts
                .iter()
                .zip(payoff)
                .map(|(&c, x)| c as f64 * (x - mean))
                .sum();
            Ok((centered / n as f64).abs() > epsilon)
        })?;
        let estimate = hits as f64 / reps as f64;
        points.push(ConcentrationPoint {
            n,
            estimate,
            std_error: (estimate * (1.0 - estimate) / reps as f64).sqrt(),
            chebyshev_bound: (var / (n as f64 * epsilon * epsilon)).min(1.0),
        });
    }
    Ok(points)
}
