//! The three classifiers and their shared persistence format.
//!
//! Models serialize to versioned JSON envelopes:
//! `{version: 1, kind: "nb"|"lr"|"rf", n_classes, n_features, payload: {...}}`.
//! A reloaded model predicts bit-identically to the one that was saved.

mod lr;
mod nb;
mod rf;

pub use lr::{loss_and_gradient, train_lr, train_lr_traced, LrConfig, LrModel, OptimizerReport};
pub use nb::{train_nb, NbModel};
pub use rf::{train_rf, Criterion, MaxFeaturesRule, RfConfig, RfModel, TreeNode};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A classification outcome: the winning class plus the full distribution.
/// The class is always the argmax with ties broken toward the lowest index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: usize,
    pub probabilities: Vec<f64>,
}

/// Index of the largest value; the lowest index wins exact ties.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Turns log-space class scores into normalized probabilities (log-sum-exp)
/// and returns the argmax class. Adding a constant to every score — i.e.
/// scaling all unnormalized probabilities by a positive factor — changes
/// nothing.
pub(crate) fn normalize_log_scores(scores: &[f64]) -> (usize, Vec<f64>) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let probs: Vec<f64> = exps.iter().map(|&e| e / z).collect();
    (argmax_lowest(&probs), probs)
}

/// Softmax over raw scores, in place; returns the argmax class.
pub(crate) fn softmax_in_place(scores: &mut [f64]) -> usize {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        z += *s;
    }
    for s in scores.iter_mut() {
        *s /= z;
    }
    argmax_lowest(scores)
}

/// Which classifier to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nb,
    Lr,
    Rf,
}

impl ModelKind {
    pub fn parse(s: &str) -> Option<ModelKind> {
        match s {
            "nb" => Some(ModelKind::Nb),
            "lr" => Some(ModelKind::Lr),
            "rf" => Some(ModelKind::Rf),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Nb => "nb",
            ModelKind::Lr => "lr",
            ModelKind::Rf => "rf",
        }
    }
}

/// Hyperparameters for all three trainers, with the defaults the offline
/// system uses (RF: 400 estimators, entropy, seed 42; NB: α = 1).
#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub kind: ModelKind,
    pub nb_alpha: f64,
    pub lr: LrConfig,
    pub rf: RfConfig,
}

impl TrainOptions {
    pub fn new(kind: ModelKind) -> TrainOptions {
        TrainOptions {
            kind,
            nb_alpha: 1.0,
            lr: LrConfig::default(),
            rf: RfConfig::default(),
        }
    }
}

/// Trains the classifier selected by `options.kind`.
pub fn train_model(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    options: &TrainOptions,
) -> Result<Model> {
    Ok(match options.kind {
        ModelKind::Nb => Model::Nb(train_nb(x, y, n_classes, options.nb_alpha)?),
        ModelKind::Lr => Model::Lr(train_lr(x, y, n_classes, options.lr)?),
        ModelKind::Rf => Model::Rf(train_rf(x, y, n_classes, options.rf)?),
    })
}

/// Any of the three trained classifiers.
#[derive(Debug, Clone)]
pub enum Model {
    Nb(NbModel),
    Lr(LrModel),
    Rf(RfModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Nb(_) => "nb",
            Model::Lr(_) => "lr",
            Model::Rf(_) => "rf",
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Model::Nb(m) => m.n_classes(),
            Model::Lr(m) => m.n_classes(),
            Model::Rf(m) => m.n_classes,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Nb(m) => m.n_features(),
            Model::Lr(m) => m.n_features(),
            Model::Rf(m) => m.n_features,
        }
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        match self {
            Model::Nb(m) => m.predict(x),
            Model::Lr(m) => m.predict(x),
            Model::Rf(m) => m.predict(x),
        }
    }

    pub fn predict_batch(&self, xs: &[SparseVector]) -> Result<Vec<Prediction>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    pub fn save_to_path(&self, path: &Path) -> Result<()> {
        let payload = match self {
            Model::Nb(m) => serde_json::to_value(m),
            Model::Lr(m) => serde_json::to_value(m),
            Model::Rf(m) => serde_json::to_value(m),
        }
        .map_err(|e| Error::Config(format!("model serialization: {e}")))?;
        let envelope = ModelEnvelope {
            version: MODEL_FORMAT_VERSION,
            kind: self.kind().to_string(),
            n_classes: self.n_classes(),
            n_features: self.n_features(),
            payload,
        };
        let json = serde_json::to_string(&envelope)
            .map_err(|e| Error::Config(format!("model serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load_from_path(path: &Path) -> Result<Model> {
        let raw = std::fs::read_to_string(path)?;
        let envelope: ModelEnvelope = serde_json::from_str(&raw)
            .map_err(|e| Error::ModelLoad(format!("malformed model file: {e}")))?;
        if envelope.version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelLoad(format!(
                "unsupported model version {} (expected {})",
                envelope.version, MODEL_FORMAT_VERSION
            )));
        }
        let model = match envelope.kind.as_str() {
            "nb" => Model::Nb(parse_payload(envelope.payload)?),
            "lr" => Model::Lr(parse_payload(envelope.payload)?),
            "rf" => Model::Rf(parse_payload(envelope.payload)?),
            other => {
                return Err(Error::ModelLoad(format!("unknown model kind {other:?}")));
            }
        };
        if model.n_classes() != envelope.n_classes || model.n_features() != envelope.n_features {
            return Err(Error::ModelLoad(format!(
                "envelope shape {}x{} does not match payload {}x{}",
                envelope.n_classes,
                envelope.n_features,
                model.n_classes(),
                model.n_features()
            )));
        }
        Ok(model)
    }
}

fn parse_payload<T: serde::de::DeserializeOwned>(payload: serde_json::Value) -> Result<T> {
    serde_json::from_value(payload).map_err(|e| Error::ModelLoad(format!("malformed payload: {e}")))
}

#[derive(Serialize, Deserialize)]
struct ModelEnvelope {
    version: u32,
    kind: String,
    n_classes: usize,
    n_features: usize,
    payload: serde_json::Value,
}
