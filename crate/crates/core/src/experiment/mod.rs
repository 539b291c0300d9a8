//! Config-driven experiments: σ-sweeps of the distortion law, collapse
//! sampling through the POVM, detection-power grids and weak-law
//! concentration tables.

pub mod config;
pub mod emit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{
    classify_regime, entropy_gradient, exercise_will, regime_of, unpredictability, Regime,
    WillStrength,
};
use crate::error::{ModelError, StatsError};
use crate::quantum::{build_povm, check_completeness, prepare_state, CollapseSampler};
use crate::rng::{derive_seed, stream};
use crate::stats::{
    chi_squared_test, detection_power, lln_concentration, ConcentrationPoint, PowerQuery,
    TrialCounts, Verdict,
};

pub use config::{ExperimentConfig, OutputFormat, RawConfig};
pub use emit::{emit, render};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(StatsError),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<StatsError> for ExperimentError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::Model(m) => ExperimentError::Model(m),
            other => ExperimentError::Stats(other),
        }
    }
}

impl ExperimentError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::ConfigInvalid { .. } => 2,
            ExperimentError::Model(_) | ExperimentError::Stats(_) => 3,
            ExperimentError::Io { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Distort,
    Collapse,
    Power,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Distort => "distort",
            ExperimentKind::Collapse => "collapse",
            ExperimentKind::Power => "power",
        }
    }
}

/// One output row. Columns that an experiment does not compute are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    #[serde(with = "emit::num")]
    pub sigma: f64,
    #[serde(with = "emit::num_vec")]
    pub p_prime: Vec<f64>,
    #[serde(with = "emit::num")]
    pub xi_bits: f64,
    #[serde(with = "emit::num")]
    pub dh_dsigma: f64,
    pub regime: Regime,
    #[serde(with = "emit::num_opt")]
    pub residual: Option<f64>,
    #[serde(with = "emit::num_opt")]
    pub chi2: Option<f64>,
    #[serde(with = "emit::num_opt")]
    pub p_value: Option<f64>,
    pub verdict: Option<Verdict>,
    #[serde(with = "emit::num_opt")]
    pub power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "emit::num_opt")]
    pub noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "emit::num_vec_opt")]
    pub frequencies: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub experiment: ExperimentKind,
    pub outcomes: usize,
    pub input: RawConfig,
    pub rows: Vec<ResultRow>,
}

impl ResultRecord {
    fn new(kind: ExperimentKind, config: &ExperimentConfig, seed: u64) -> Self {
        let mut input = config.echo();
        input.seed = Some(seed);
        Self {
            id: format!("{}-{seed}", kind.as_str()),
            experiment: kind,
            outcomes: config.nature.len(),
            input,
            rows: Vec::new(),
        }
    }
}

/// The analytic columns shared by every experiment.
fn analytic_row(config: &ExperimentConfig, will: WillStrength) -> Result<ResultRow, ModelError> {
    let p_prime = exercise_will(&config.nature, &config.understanding, will)?;
    let dh_dsigma = match entropy_gradient(&config.nature, &config.understanding, will) {
        Ok(g) => g,
        Err(ModelError::DivergentGradient { positive: true, .. }) => f64::INFINITY,
        Err(ModelError::DivergentGradient { positive: false, .. }) => f64::NEG_INFINITY,
        Err(e) => return Err(e),
    };
    debug_assert_eq!(
        regime_of(dh_dsigma),
        classify_regime(&config.nature, &config.understanding, will)?
    );
    Ok(ResultRow {
        sigma: will.value(),
        xi_bits: unpredictability(&p_prime),
        p_prime: p_prime.weights().to_vec(),
        dh_dsigma,
        regime: regime_of(dh_dsigma),
        residual: None,
        chi2: None,
        p_value: None,
        verdict: None,
        power: None,
        trials: None,
        noise: None,
        frequencies: None,
    })
}

/// Distorted distribution, entropy, gradient and regime for each σ.
pub fn run_distort(config: &ExperimentConfig, seed: u64) -> Result<ResultRecord, ExperimentError> {
    let mut record = ResultRecord::new(ExperimentKind::Distort, config, seed);
    for &will in &config.sigmas {
        record.rows.push(analytic_row(config, will)?);
    }
    Ok(record)
}

/// Prepares the state, builds the POVM, and collapses it `trials` times for
/// each (σ, trials) pair, testing the frequencies against the Born rule.
pub fn run_collapse(config: &ExperimentConfig, seed: u64) -> Result<ResultRecord, ExperimentError> {
    let mut record = ResultRecord::new(ExperimentKind::Collapse, config, seed);
    let state = prepare_state(&config.nature);
    let mut point = 0u64;
    for &will in &config.sigmas {
        let povm = build_povm(&config.nature, &config.understanding, will)?;
        let residual = check_completeness(&povm, &state)?;
        let sampler = CollapseSampler::new(&povm, &state)?;
        for &n in &config.trials {
            let mut rng = stream(seed, point);
            let mut counts = vec![0u64; state.len()];
            for _ in 0..n {
                counts[sampler.sample_index(&mut rng)] += 1;
            }
            let counts = TrialCounts::new(counts, seed, point).map_err(ExperimentError::from)?;
            let mut row = analytic_row(config, will)?;
            row.residual = Some(residual);
            row.trials = Some(n);
            row.frequencies = Some(counts.frequencies());
            match chi_squared_test(&counts, &config.nature, config.alpha) {
                Ok(report) => {
                    row.chi2 = Some(report.statistic);
                    row.p_value = Some(report.p_value);
                    row.verdict = Some(report.verdict);
                }
                // a degenerate Born distribution leaves nothing to test
                Err(StatsError::InsufficientExpected) => {}
                Err(e) => return Err(e.into()),
            }
            record.rows.push(row);
            point += 1;
        }
    }
    Ok(record)
}

/// Detection power at every (σ, trials, noise) grid point, σ-major.
pub fn run_power(config: &ExperimentConfig, seed: u64) -> Result<ResultRecord, ExperimentError> {
    let mut record = ResultRecord::new(ExperimentKind::Power, config, seed);
    let mut point = 0u64;
    for &will in &config.sigmas {
        for &n in &config.trials {
            for &noise in &config.noise {
                let power = detection_power(&PowerQuery {
                    nature: config.nature.clone(),
                    understanding: config.understanding.clone(),
                    will,
                    noise,
                    trials: n,
                    alpha: config.alpha,
                    reps: config.reps,
                    seed: derive_seed(seed, point),
                })?;
                let mut row = analytic_row(config, will)?;
                row.power = Some(power);
                row.trials = Some(n);
                row.noise = Some(noise.value());
                record.rows.push(row);
                point += 1;
            }
        }
    }
    Ok(record)
}

/// Weak-law table for the config's payoff, epsilon and n schedule, using
/// the effective distribution at the first σ.
pub fn run_lln(
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<ConcentrationPoint>, ExperimentError> {
    let will = config.sigmas.first().copied().unwrap_or(WillStrength::NONE);
    let dist = exercise_will(&config.nature, &config.understanding, will)?;
    Ok(lln_concentration(
        &dist,
        &config.payoff,
        config.epsilon,
        &config.n_schedule,
        config.reps,
        seed,
    )?)
}
