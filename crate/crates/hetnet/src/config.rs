//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! drops = 50
//! seed = 2024
//! schemes = ["MAX_UTILITY", "MAX_RATE", "MAX_SINR", "RATE_BIAS", "SINR_BIAS"]
//! target_rates = [250000.0, 500000.0, 1000000.0, 2000000.0]
//! out_dir = "out"
//!
//! [scenario]
//! pbs_per_macrocell = 4
//!
//! [partition]
//! eta = 0.5
//! ```
//!
//! Every section is optional and falls back to its defaults; unknown keys are
//! rejected. The `rng_seed` fields of `[scenario]` and `[channel]` are
//! overwritten per drop with seeds derived from the top-level `seed`.

use std::fs;
use std::path::{Path, PathBuf};

use hetnet_core::{ChannelConfig, PartitionConfig, RadioConfig, ScenarioConfig, SchemeId, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub drops: usize,
    /// Master seed; drop `i` derives its layout and channel seeds from `(seed, i)`.
    pub seed: u64,
    pub schemes: Vec<SchemeId>,
    /// Coverage targets in bps.
    pub target_rates: Vec<f64>,
    pub eta_sweep: Option<Vec<f64>>,
    pub d2d_sweep: Option<Vec<usize>>,
    pub out_dir: PathBuf,
    pub scenario: ScenarioConfig,
    pub channel: ChannelConfig,
    pub partition: PartitionConfig,
    pub radio: RadioConfig,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            drops: 10,
            seed: 2024,
            schemes: SchemeId::ALL.to_vec(),
            target_rates: vec![0.25e6, 0.5e6, 1e6, 2e6],
            eta_sweep: None,
            d2d_sweep: None,
            out_dir: PathBuf::from("out"),
            scenario: ScenarioConfig::default(),
            channel: ChannelConfig::default(),
            partition: PartitionConfig::default(),
            radio: RadioConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

/// η grid used when neither the config nor the command line gives one.
pub const DEFAULT_ETA_SWEEP: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.drops == 0 {
            return Err(HarnessError::Config("drops must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(HarnessError::Config("at least one scheme is required".into()));
        }
        if self.schemes.contains(&SchemeId::RateBias) && !self.schemes.contains(&SchemeId::MaxUtility) {
            return Err(HarnessError::Config(
                "RATE_BIAS needs MAX_UTILITY in the same run to supply its prices".into(),
            ));
        }
        if let Some(bad) = self.target_rates.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(HarnessError::Config(format!("target rate {bad} must be >= 0")));
        }
        if let Some(etas) = &self.eta_sweep {
            if let Some(bad) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                return Err(HarnessError::Config(format!("eta {bad} is outside [0, 1]")));
            }
        }
        self.scenario.validate()?;
        self.channel.validate()?;
        self.partition.validate()?;
        self.radio.validate()?;
        self.solver.validate()?;
        Ok(())
    }

    /// Schemes in execution order: Max-Utility first so Rate Bias can reuse its prices.
    pub fn ordered_schemes(&self) -> Vec<SchemeId> {
        let mut schemes = self.schemes.clone();
        schemes.sort();
        schemes.dedup();
        schemes
    }
}
