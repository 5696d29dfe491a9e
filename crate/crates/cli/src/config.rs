//! JSON configuration files: run settings and synthetic model definitions.

use std::fs;
use std::path::Path;

use mixjitter::estimators::Kernel;
use mixjitter::oracle::{DiscretePmf, GaussianConditional, SyntheticMixedModel};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::csvio::SchemaSpec;
use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_THETA: f64 = 0.8;
pub const DEFAULT_NU: u32 = 5;
pub const DEFAULT_JITTERS: usize = 1;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Settings file accepted by `--config`. Command-line flags override it.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub seed: Option<u64>,
    pub theta: Option<f64>,
    pub nu: Option<u32>,
    pub jitters: Option<usize>,
    pub kernel: Option<Kernel>,
    pub bandwidth: Option<Vec<f64>>,
    pub discrete: Vec<String>,
    pub continuous: Vec<String>,
    pub categorical: Vec<String>,
}

impl Settings {
    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }

    pub fn schema(&self) -> SchemaSpec {
        SchemaSpec {
            discrete: self.discrete.clone(),
            continuous: self.continuous.clone(),
            categorical: self.categorical.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginConfig {
    Binomial { trials: u32, p: f64 },
    Bernoulli { p: f64 },
    PoissonTruncated { lambda: f64, max: u32 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContinuousConfig {
    /// `mean = [a, b]` gives `a + b·z`; `scale` likewise.
    Gaussian { mean: [f64; 2], scale: [f64; 2] },
}

/// Synthetic model file, e.g.
/// `{"margin": {"family": "binomial", "trials": 4, "p": 0.3}}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub margin: MarginConfig,
    #[serde(default)]
    pub continuous: Option<ContinuousConfig>,
}

impl ModelConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }

    /// Binomial(4, 0.3), the default benchmark model.
    pub fn default_binomial() -> Self {
        Self {
            margin: MarginConfig::Binomial { trials: 4, p: 0.3 },
            continuous: None,
        }
    }

    pub fn build(&self) -> CliResult<SyntheticMixedModel> {
        let margin = match self.margin {
            MarginConfig::Binomial { trials, p } => DiscretePmf::binomial(trials, p),
            MarginConfig::Bernoulli { p } => DiscretePmf::bernoulli(p),
            MarginConfig::PoissonTruncated { lambda, max } => DiscretePmf::poisson_truncated(lambda, max),
        }
        .map_err(|e| CliError::Config(format!("margin: {e}")))?;
        match &self.continuous {
            None => Ok(SyntheticMixedModel::discrete(margin)),
            Some(ContinuousConfig::Gaussian { mean, scale }) => {
                let cond = GaussianConditional {
                    mean_intercept: mean[0],
                    mean_slope: mean[1],
                    scale_intercept: scale[0],
                    scale_slope: scale[1],
                };
                SyntheticMixedModel::mixed(margin, cond).map_err(|e| CliError::Config(format!("continuous: {e}")))
            }
        }
    }
}
