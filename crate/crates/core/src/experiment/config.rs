//! Experiment configuration files.
//!
//! A config is a JSON object. Every key is optional except that the
//! choice model must be given either by `archetype` or by `nature` and
//! `understanding` (explicit keys override archetype values):
//!
//! ```json
//! {
//!   "labels": ["coffee", "tea", "alcohol"],
//!   "nature": [0.25, 0.25, 0.5],
//!   "understanding": [0.5, 0.5, 0.0],
//!   "sigma": {"start": 0.0, "stop": 1.0, "steps": 11},
//!   "trials": [100, 1000],
//!   "alpha": 0.05,
//!   "noise": [0.0, 0.25, 0.5],
//!   "reps": 1000,
//!   "seed": 7,
//!   "output": "sweep.csv",
//!   "format": "csv"
//! }
//! ```
//!
//! `sigma` is a number or a sweep; `trials` and `noise` are a number or a
//! list. The `lln` subcommand also reads `payoff`, `epsilon` and
//! `n_schedule`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::agents::{archetype, Archetype, ArchetypeKind};
use crate::distribution::{ChoiceSpace, ProbabilityVector, WillStrength};
use crate::stats::{NoiseLevel, DEFAULT_ALPHA};

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_REPS: u64 = 1000;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_N_SCHEDULE: [u64; 3] = [100, 1000, 10_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format {s:?}, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    Fixed(f64),
    Sweep(SweepSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// The config file as written, before validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archetype: Option<ArchetypeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nature: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub understanding: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<OneOrMany<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<OneOrMany<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_schedule: Option<Vec<u64>>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub space: ChoiceSpace,
    pub nature: ProbabilityVector,
    pub understanding: ProbabilityVector,
    pub sigmas: Vec<WillStrength>,
    pub trials: Vec<u64>,
    pub alpha: f64,
    pub noise: Vec<NoiseLevel>,
    pub reps: u64,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub payoff: Vec<f64>,
    pub epsilon: f64,
    pub n_schedule: Vec<u64>,
}

fn invalid(field: &str, message: impl ToString) -> ExperimentError {
    ExperimentError::ConfigInvalid { field: field.to_string(), message: message.to_string() }
}

fn vector(field: &str, weights: Vec<f64>) -> Result<ProbabilityVector, ExperimentError> {
    ProbabilityVector::new(weights, false).map_err(|e| invalid(field, e))
}

impl SweepSpec {
    /// Evenly spaced values with exact endpoints.
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * f64::from(i) / f64::from(last)
                }
            })
            .collect()
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| invalid("<document>", e))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, ExperimentError> {
        let base = raw.archetype.map(|k| {
            let particle = raw
                .nature
                .clone()
                .and_then(|w| ProbabilityVector::new(w, false).ok());
            archetype(&Archetype::from_kind(k, particle))
        });

        let nature = match (raw.nature, &base) {
            (Some(w), _) => vector("nature", w)?,
            (None, Some(b)) => b.nature().clone(),
            (None, None) => return Err(invalid("nature", "missing (give nature or archetype)")),
        };
        let understanding = match (raw.understanding, &base) {
            (Some(w), _) => vector("understanding", w)?,
            (None, Some(b)) if b.nature().len() == nature.len() => b.understanding().clone(),
            (None, Some(_)) => {
                return Err(invalid("understanding", "archetype guidance does not match nature's dimension"))
            }
            (None, None) => {
                return Err(invalid("understanding", "missing (give understanding or archetype)"))
            }
        };
        if understanding.len() != nature.len() {
            return Err(invalid(
                "understanding",
                format!("has {} outcomes, nature has {}", understanding.len(), nature.len()),
            ));
        }
        let space = match (raw.labels, &base) {
            (Some(l), _) => ChoiceSpace::new(l).map_err(|e| invalid("labels", e))?,
            (None, Some(b)) if b.space().len() == nature.len() => b.space().clone(),
            _ => ChoiceSpace::indexed(nature.len()).map_err(|e| invalid("labels", e))?,
        };
        space.check(&nature).map_err(|e| invalid("labels", e))?;

        let sigma_values = match raw.sigma {
            Some(SigmaSpec::Fixed(s)) => vec![s],
            Some(SigmaSpec::Sweep(sw)) => {
                if sw.steps < 1 {
                    return Err(invalid("sigma.steps", "must be at least 1"));
                }
                if sw.start > sw.stop {
                    return Err(invalid("sigma", "sweep start must not exceed stop"));
                }
                sw.values()
            }
            None => match &base {
                Some(b) => vec![b.will().value()],
                None => return Err(invalid("sigma", "missing (give sigma or archetype)")),
            },
        };
        let sigmas = sigma_values
            .into_iter()
            .map(WillStrength::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid("sigma", e))?;

        let trials = raw.trials.map(|t| t.to_vec()).unwrap_or_else(|| vec![DEFAULT_TRIALS]);
        if trials.is_empty() || trials.contains(&0) {
            return Err(invalid("trials", "every trial count must be at least 1"));
        }
        let alpha = raw.alpha.unwrap_or(DEFAULT_ALPHA);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("{alpha} is outside (0, 1)")));
        }
        let noise = raw
            .noise
            .map(|n| n.to_vec())
            .unwrap_or_else(|| vec![0.0])
            .into_iter()
            .map(NoiseLevel::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid("noise", e))?;
        if noise.is_empty() {
            return Err(invalid("noise", "needs at least one level"));
        }
        let reps = raw.reps.unwrap_or(DEFAULT_REPS);
        if reps == 0 {
            return Err(invalid("reps", "must be at least 1"));
        }

        let payoff = match raw.payoff {
            Some(p) => p,
            None => (0..nature.len()).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect(),
        };
        if payoff.len() != nature.len() || payoff.iter().any(|x| !x.is_finite()) {
            return Err(invalid("payoff", "needs one finite value per outcome"));
        }
        let epsilon = raw.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be positive"));
        }
        let n_schedule = raw.n_schedule.unwrap_or_else(|| DEFAULT_N_SCHEDULE.to_vec());
        if n_schedule.is_empty() || n_schedule.contains(&0) {
            return Err(invalid("n_schedule", "every n must be at least 1"));
        }

        Ok(Self {
            space,
            nature,
            understanding,
            sigmas,
            trials,
            alpha,
            noise,
            reps,
            seed: raw.seed,
            output: raw.output,
            format: raw.format,
            payoff,
            epsilon,
            n_schedule,
        })
    }

    /// The resolved config as a raw document, for echoing into results.
    pub fn echo(&self) -> RawConfig {
        RawConfig {
            archetype: None,
            labels: Some(self.space.labels().to_vec()),
            nature: Some(self.nature.weights().to_vec()),
            understanding: Some(self.understanding.weights().to_vec()),
            sigma: None,
            trials: Some(OneOrMany::Many(self.trials.clone())),
            alpha: Some(self.alpha),
            noise: Some(OneOrMany::Many(self.noise.iter().map(|n| n.value()).collect())),
            reps: Some(self.reps),
            seed: self.seed,
            output: None,
            format: None,
            payoff: Some(self.payoff.clone()),
            epsilon: Some(self.epsilon),
            n_schedule: Some(self.n_schedule.clone()),
        }
    }
}

impl From<&crate::agents::AgentProfile> for RawConfig {
    /// A config document reproducing `agent` at its own will strength.
    fn from(agent: &crate::agents::AgentProfile) -> Self {
        RawConfig {
            labels: Some(agent.space().labels().to_vec()),
            nature: Some(agent.nature().weights().to_vec()),
            understanding: Some(agent.understanding().weights().to_vec()),
            sigma: Some(SigmaSpec::Fixed(agent.will().value())),
            ..RawConfig::default()
        }
    }
}
