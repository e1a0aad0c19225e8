//! Blame classifiers: logistic regression, CART decision trees, random
//! forests and a one-hidden-layer perceptron.
//!
//! Every model maps a feature vector to a confidence in `[0, 1]` that the
//! node should be blamed. Training is deterministic given the seed in
//! [`TrainConfig`].

mod adam;
mod forest;
mod logistic;
mod mlp;
mod persist;
mod scaler;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use forest::{eval_forest, train_forest, RandomForest};
pub use logistic::{
    eval_logistic, gradient_logistic, loss_logistic, train_logistic, train_logistic_traced,
    LogisticModel,
};
pub use mlp::{eval_mlp, gradient_mlp, loss_mlp, relu, train_mlp, train_mlp_traced, MlpModel};
pub use persist::{load, save, ModelHeader, MAGIC};
pub use scaler::Scaler;
pub use tree::{eval_tree, train_tree, DecisionTree, TreeNode};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("expected a vector of width {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported model file version {0:?}")]
    VersionMismatch(String),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Nodes at or below this Gini impurity become leaves.
    pub impurity_threshold: f64,
    pub n_estimators: usize,
    /// Sample ⌈√width⌉ candidate features at each forest node.
    pub feature_subsampling: bool,
    pub hidden_units: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            l2: 0.001,
            batch_size: 200,
            epochs: 20,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            impurity_threshold: 1e-7,
            n_estimators: 30,
            feature_subsampling: true,
            hidden_units: 10,
        }
    }
}

impl TrainConfig {
    /// Negated comparisons so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidConfig(m.to_string()));
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(self.l2 >= 0.0) {
            return bad("l2 must be non-negative");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.n_estimators == 0 {
            return bad("a forest needs at least one tree");
        }
        if self.hidden_units == 0 {
            return bad("the hidden layer needs at least one unit");
        }
        Ok(())
    }
}

/// Feature rows with their blame bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<bool>,
    width: usize,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<bool>) -> Result<Self, ModelError> {
        if x.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        if x.len() != y.len() {
            return Err(ModelError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        let width = x[0].len();
        if let Some(row) = x.iter().find(|r| r.len() != width) {
            return Err(ModelError::DimensionMismatch {
                expected: width,
                got: row.len(),
            });
        }
        Ok(Dataset { x, y, width })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn labels(&self) -> &[bool] {
        &self.y
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&b| b).count()
    }
}

pub(crate) fn check_width(expected: usize, v: &[f64]) -> Result<(), ModelError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(ModelError::DimensionMismatch {
            expected,
            got: v.len(),
        })
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Cross-entropy of predicting `p` for label `y`, clamped away from log(0).
pub(crate) fn cross_entropy(p: f64, y: bool) -> f64 {
    let p = p.clamp(1e-15, 1.0 - 1e-15);
    if y {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Linear,
    Tree,
    Forest,
    Mlp10,
    Mlp500,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Linear,
        ModelKind::Tree,
        ModelKind::Forest,
        ModelKind::Mlp10,
        ModelKind::Mlp500,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Tree => "tree",
            ModelKind::Forest => "forest",
            ModelKind::Mlp10 => "mlp10",
            ModelKind::Mlp500 => "mlp500",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!("unknown model {s}; expected linear, tree, forest, mlp10 or mlp500")
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Logistic(LogisticModel),
    Tree(DecisionTree),
    Forest(RandomForest),
    Mlp(MlpModel),
}

impl Model {
    pub fn train(kind: ModelKind, data: &Dataset, cfg: &TrainConfig) -> Result<Model, ModelError> {
        Ok(match kind {
            ModelKind::Linear => Model::Logistic(train_logistic(data, cfg)?),
            ModelKind::Tree => Model::Tree(train_tree(data, cfg)?),
            ModelKind::Forest => Model::Forest(train_forest(data, cfg)?),
            ModelKind::Mlp10 | ModelKind::Mlp500 => {
                let hidden_units = if kind == ModelKind::Mlp10 { 10 } else { 500 };
                let cfg = TrainConfig {
                    hidden_units,
                    ..cfg.clone()
                };
                Model::Mlp(train_mlp(data, &cfg)?)
            }
        })
    }

    pub fn width(&self) -> usize {
        match self {
            Model::Logistic(m) => m.weights.len(),
            Model::Tree(m) => m.width,
            Model::Forest(m) => m.width,
            Model::Mlp(m) => m.input_width(),
        }
    }

    /// Confidence that `v` should be blamed.
    pub fn eval(&self, v: &[f64]) -> Result<f64, ModelError> {
        match self {
            Model::Logistic(m) => eval_logistic(m, v),
            Model::Tree(m) => eval_tree(m, v),
            Model::Forest(m) => eval_forest(m, v),
            Model::Mlp(m) => eval_mlp(m, v),
        }
    }
}
