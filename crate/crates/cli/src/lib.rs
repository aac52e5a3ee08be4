//! Config-driven experiment runner.
//!
//! A run reads a flat `key = value` config (see [`config`]), executes
//! prepare → featurize → train → evaluate or one of the analysis commands,
//! and leaves JSON/CSV reports plus a manifest of content hashes in the
//! output directory.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod run;
pub mod synth;

pub use analysis::{run_analysis, AnalysisReport};
pub use commands::{run_prepare, run_projection, run_stats};
pub use config::{ExperimentConfig, RawConfig};
pub use error::{Stage, StageError};
pub use experiment::{run_evaluation, run_experiment, ExperimentReport, MetricsFile};
pub use run::Manifest;
