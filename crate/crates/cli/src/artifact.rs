//! Versioned JSON model artifacts written by `fit` and read by `eval`.

use std::fs;
use std::path::Path;

use mixjitter::estimators::{KdeModel, LocLinModel};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT: &str = "mixjitter-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", content = "model", rename_all = "snake_case")]
pub enum FittedModel {
    Kde(KdeModel),
    Loclin(LocLinModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub fitted: FittedModel,
}

impl Artifact {
    pub fn new(fitted: FittedModel) -> Self {
        Self {
            format: FORMAT.to_owned(),
            version: VERSION,
            fitted,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string(self).map_err(|e| CliError::Data(format!("serializing model: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        // read the envelope first so a version mismatch is reported as such
        #[derive(Deserialize)]
        struct Envelope {
            format: String,
            version: u32,
        }
        let env: Envelope =
            serde_json::from_str(text).map_err(|e| CliError::Data(format!("not a model artifact: {e}")))?;
        if env.format != FORMAT {
            return Err(CliError::Data(format!("unknown artifact format `{}`", env.format)));
        }
        if env.version != VERSION {
            return Err(CliError::Data(format!(
                "artifact version {} is not supported (expected {VERSION})",
                env.version
            )));
        }
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("malformed model artifact: {e}")))
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json()?).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}
