//! WebAssembly bindings for the `www/` demo page.
//!
//! Each export takes an experiment config as JSON (the same schema the
//! `funwill` CLI reads) and returns the result record as JSON.

use funwill_core::experiment::{
    render, run_collapse, run_distort, run_power, ExperimentConfig, ExperimentError, OutputFormat,
    ResultRecord,
};
use wasm_bindgen::prelude::*;

fn run_json(
    config: &str,
    seed: u64,
    run: fn(&ExperimentConfig, u64) -> Result<ResultRecord, ExperimentError>,
) -> Result<String, String> {
    let config = ExperimentConfig::from_json(config).map_err(|e| e.to_string())?;
    let record = run(&config, seed).map_err(|e| e.to_string())?;
    render(&record, OutputFormat::Json).map_err(|e| e.to_string())
}

pub fn distort_json(config: &str) -> Result<String, String> {
    run_json(config, 0, run_distort)
}

pub fn collapse_json(config: &str, seed: u64) -> Result<String, String> {
    run_json(config, seed, run_collapse)
}

pub fn power_json(config: &str, seed: u64) -> Result<String, String> {
    run_json(config, seed, run_power)
}

/// σ-sweep of P′, ξ and dH/dσ.
#[wasm_bindgen]
pub fn distort(config: &str) -> Result<String, JsError> {
    distort_json(config).map_err(|e| JsError::new(&e))
}

/// Collapse histogram at each σ of the config.
#[wasm_bindgen]
pub fn collapse(config: &str, seed: u64) -> Result<String, JsError> {
    collapse_json(config, seed).map_err(|e| JsError::new(&e))
}

/// Detection power over the config's (σ, trials, noise) grid.
#[wasm_bindgen]
pub fn power(config: &str, seed: u64) -> Result<String, JsError> {
    power_json(config, seed).map_err(|e| JsError::new(&e))
}
