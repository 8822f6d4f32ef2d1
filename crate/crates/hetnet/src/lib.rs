//! Experiment harness around [`hetnet_core`]: configuration files, seeded
//! Monte Carlo drops, parameter sweeps, CSV/JSON reports, instance files and
//! the exhaustive-search cross-check.

pub mod config;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod oracle;
pub mod output;

pub use config::{ExperimentConfig, DEFAULT_ETA_SWEEP};
pub use error::{HarnessError, Result};
pub use experiment::{
    derive_seed, run_experiment, run_schemes, sweep_d2d, sweep_eta, Aggregate, Drop, DropRow, DropSeeds,
    Instance, MeanSe, RunReport,
};
pub use hetnet_core;
pub use oracle::{oracle_check, OracleCase};
