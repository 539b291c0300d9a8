//! Will-distorted choice distributions and their quantum realization.
//!
//! An agent facing `n` alternatives has a distribution `P` imposed by its
//! nature, a recommendation `P^U` from its understanding, and a will
//! strength `σ ∈ [0, 1]`. It chooses from `P′ = σ·P^U + (1−σ)·P`.
//!
//! * [`distribution`]: the distortion law, entropy, its σ-gradient and distances.
//! * [`quantum`]: the same law as directed collapse through a state-dependent POVM.
//! * [`agents`]: canonical agent profiles and choice sampling.
//! * [`stats`]: seeded trials, chi-squared tests, detection power, noise masking.
//! * [`experiment`]: config-driven sweeps and CSV/JSON output for the `funwill` CLI.

pub mod agents;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod quantum;
pub mod rng;
pub mod stats;

pub use distribution::{ChoiceSpace, ProbabilityVector, Regime, WillStrength};
pub use error::{ModelError, StatsError};
