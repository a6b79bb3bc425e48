//! Binary classifiers scoring the probability of four-four time.

mod forest;
mod gbdt;
mod logistic;
mod persist;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{LabeledDataset, TimeSignature};

pub use forest::{train_forest, ForestConfig, ForestModel};
pub use gbdt::{gradient_hessian, leaf_weight, logistic_raw_loss, split_gain, train_gbdt, BoostedEnsemble, GbdtConfig};
pub use logistic::{logistic_loss_and_gradient, sigmoid, train_logistic, LogisticConfig, LogisticModel};
pub use persist::{load_model, save_model, ModelBundle, MODEL_FORMAT_VERSION};
pub use tree::{best_gini_split, gini, train_tree, DecisionTree, GiniSplit, Tree, TreeConfig, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ModelKind {
    Logistic,
    Tree,
    Forest,
    #[default]
    Gbdt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Logistic, ModelKind::Tree, ModelKind::Forest, ModelKind::Gbdt];

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::Tree => "tree",
            ModelKind::Forest => "forest",
            ModelKind::Gbdt => "gbdt",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::argument(format!("unknown model kind `{s}`")))
    }
}

/// Model kind plus the hyperparameters of every kind; only the selected
/// kind's block is used.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub logistic: LogisticConfig,
    pub tree: TreeConfig,
    pub forest: ForestConfig,
    pub gbdt: GbdtConfig,
    pub seed: u64,
}

impl TrainConfig {
    pub fn of_kind(kind: ModelKind) -> Self {
        TrainConfig {
            kind,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Logistic(LogisticModel),
    Tree(DecisionTree),
    Forest(ForestModel),
    Gbdt(BoostedEnsemble),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Logistic(_) => ModelKind::Logistic,
            TrainedModel::Tree(_) => ModelKind::Tree,
            TrainedModel::Forest(_) => ModelKind::Forest,
            TrainedModel::Gbdt(_) => ModelKind::Gbdt,
        }
    }

    pub fn dimensionality(&self) -> usize {
        match self {
            TrainedModel::Logistic(m) => m.weights.len(),
            TrainedModel::Tree(m) => m.tree.dimensionality,
            TrainedModel::Forest(m) => m.dimensionality,
            TrainedModel::Gbdt(m) => m.dimensionality,
        }
    }

    fn score(&self, x: &[f64]) -> f64 {
        match self {
            TrainedModel::Logistic(m) => m.probability(x),
            TrainedModel::Tree(m) => m.tree.evaluate(x),
            TrainedModel::Forest(m) => m.probability(x),
            TrainedModel::Gbdt(m) => m.probability(x),
        }
    }

    /// Probability of four-four.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimensionality() {
            return Err(Error::argument(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.dimensionality()
            )));
        }
        Ok(self.score(x).clamp(0.0, 1.0))
    }

    /// Four-four iff the probability reaches `threshold`.
    pub fn predict(&self, x: &[f64], threshold: f64) -> Result<TimeSignature> {
        Ok(TimeSignature::from_positive(self.predict_proba(x)? >= threshold))
    }

    /// Final training objective, when the learner tracks one.
    pub fn training_loss(&self) -> Option<f64> {
        match self {
            TrainedModel::Logistic(m) => m.loss_history.last().copied(),
            TrainedModel::Gbdt(m) => m.objective_history.last().copied(),
            _ => None,
        }
    }
}

fn check_trainable(x: &[Vec<f64>], y: &[f64], need_both: bool) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::degenerate("no training samples"));
    }
    if x.len() != y.len() {
        return Err(Error::argument("feature rows and targets differ in length"));
    }
    let d = x[0].len();
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::argument("ragged feature matrix"));
    }
    if need_both {
        let pos = y.iter().filter(|v| **v > 0.5).count();
        if pos == 0 || pos == y.len() {
            return Err(Error::degenerate("training data contains a single class"));
        }
    }
    Ok(d)
}

pub fn train(dataset: &LabeledDataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    let y = dataset.targets();
    let x = &dataset.rows;
    Ok(match cfg.kind {
        ModelKind::Logistic => TrainedModel::Logistic(train_logistic(x, &y, &cfg.logistic)?),
        ModelKind::Tree => TrainedModel::Tree(train_tree(x, &y, &cfg.tree)?),
        ModelKind::Forest => TrainedModel::Forest(train_forest(x, &y, &cfg.forest, cfg.seed)?),
        ModelKind::Gbdt => TrainedModel::Gbdt(train_gbdt(x, &y, &cfg.gbdt)?),
    })
}
