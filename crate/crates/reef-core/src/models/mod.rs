//! The model roster: hyperparameter specs, trained models, and one
//! prediction contract shared by every algorithm.

pub mod linear;
pub mod svr;
pub mod tree;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{ReefDataset, Standardizer};
use crate::error::{Error, Result};

pub use linear::{LinearModel, RidgeConfig};
pub use svr::{KernelSettings, KernelSpec, SvrConfig, SvrModel};
pub use tree::{ForestConfig, ForestModel, TreeConfig, TreeModel, TreeNode};

/// Anything that maps a feature row to a predicted target value.
pub trait Predictor {
    fn predict(&self, row: &[f64]) -> Result<f64>;
}

/// Hyperparameters for one roster entry. The `kind` tag selects the
/// algorithm; every parameter has a documented default, so `{"kind":
/// "forest"}` is a complete spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Linear,
    Ridge(RidgeConfig),
    Svr(SvrConfig),
    Tree(TreeConfig),
    Forest(ForestConfig),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Linear => Ok(()),
            ModelSpec::Ridge(cfg) => cfg.validate(),
            ModelSpec::Svr(cfg) => cfg.validate(),
            ModelSpec::Tree(cfg) => cfg.validate(),
            ModelSpec::Forest(cfg) => cfg.validate(),
        }
    }

    pub fn fit(&self, train: &ReefDataset) -> Result<TrainedModel> {
        match self {
            ModelSpec::Linear => linear::fit_ols(train).map(TrainedModel::Linear),
            ModelSpec::Ridge(cfg) => linear::fit_ridge(train, cfg).map(TrainedModel::Linear),
            ModelSpec::Svr(cfg) => svr::fit_svr(train, cfg).map(TrainedModel::Svr),
            ModelSpec::Tree(cfg) => tree::fit_tree(train, cfg).map(TrainedModel::Tree),
            ModelSpec::Forest(cfg) => tree::fit_forest(train, cfg).map(TrainedModel::Forest),
        }
    }
}

/// A fitted model of any roster kind, tagged for persistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Linear(LinearModel),
    Svr(SvrModel),
    Tree(TreeModel),
    Forest(ForestModel),
}

impl Predictor for TrainedModel {
    fn predict(&self, row: &[f64]) -> Result<f64> {
        match self {
            TrainedModel::Linear(m) => m.predict(row),
            TrainedModel::Svr(m) => m.predict(row),
            TrainedModel::Tree(m) => m.predict(row),
            TrainedModel::Forest(m) => m.predict(row),
        }
    }
}

/// On-disk model document: the tagged model plus the schema it was trained
/// under and the standardizer that preprocessed its inputs, so a saved file
/// is self-contained for prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    #[serde(flatten)]
    pub model: TrainedModel,
    pub feature_names: Vec<String>,
    /// Names of features that are binary day/night columns in raw CSV input.
    #[serde(default)]
    pub binary_features: Vec<String>,
    pub target_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardizer: Option<Standardizer>,
}

impl SavedModel {
    /// Predicts from a raw (unstandardized) feature row in schema order.
    pub fn predict_raw(&self, row: &[f64]) -> Result<f64> {
        match &self.standardizer {
            Some(s) => self.model.predict(&s.transform_row(row)?),
            None => self.model.predict(row),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::json(format!("serializing model for {}", path.display()), e))?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::json(format!("parsing model file {}", path.display()), e))
    }
}
