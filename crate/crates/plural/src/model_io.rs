//! Versioned JSON serialization of trained networks.

use std::path::Path;

use plural_core::{ClassSet, MlpConfig, MlpModel};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MODEL_FORMAT: &str = "plural-mlp";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingInfo {
    pub config: MlpConfig,
    pub training_items: usize,
    pub trained_without_default: bool,
    pub default_class: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    pub classes: ClassSet,
    pub training: TrainingInfo,
    /// Flat weight vector in the layout of [`MlpModel::params`].
    pub params: Vec<f64>,
}

impl ModelFile {
    pub fn new(model: &MlpModel, classes: &ClassSet, training: TrainingInfo) -> Self {
        Self {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            inputs: model.inputs(),
            hidden: model.hidden(),
            outputs: model.outputs(),
            classes: classes.clone(),
            training,
            params: model.params().to_vec(),
        }
    }

    pub fn model(&self) -> Result<MlpModel> {
        Ok(MlpModel::from_params(self.inputs, self.hidden, self.outputs, self.params.clone())?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message,
        };
        let file: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if file.format != MODEL_FORMAT {
            return Err(bad(format!("not a {MODEL_FORMAT} file")));
        }
        if file.version != MODEL_VERSION {
            return Err(bad(format!("unsupported model version {}", file.version)));
        }
        if file.classes.len() != file.outputs || file.classes.counts().len() != file.classes.len() {
            return Err(bad("class set does not match the output layer".into()));
        }
        file.model().map_err(|e| bad(e.to_string()))?;
        Ok(file)
    }
}
