//! The two supervised pipelines: node classification (attribute imputation)
//! and graph-auto-encoder link prediction, including the mixing-matrix
//! fusion regularizer, plus their evaluation metrics.

mod classify;
mod encode;
mod linkpred;
mod metrics;

pub use classify::{
    classification_loss, evaluate_classifier, impute_node_attribute, predict_class_proba,
    train_classifier, ClassifierModel, TrainClassifierConfig,
};
pub use encode::{encode_features, fit_encoding, ColumnEncoding, InputEncoding};
pub use linkpred::{
    decode_edge_prob, evaluate_link_predictor, gae_loss, mixing_cross_entropy,
    model_mixing_matrix, regularized_gae_loss, train_gae, GaeEpoch, GaeModel,
    MixingEstimateConfig, TrainGaeConfig, MIXING_LOG_FLOOR,
};
pub use metrics::{auc_rank, average_precision, roc_points};

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Evaluation summary. Classification fills `accuracy`; link prediction
/// fills `auc`, `average_precision`, the ROC points, and the probability
/// histogram (20 equal bins over [0, 1]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub loss: f64,
    pub accuracy: Option<f64>,
    pub auc: Option<f64>,
    pub average_precision: Option<f64>,
    pub roc: Vec<(f64, f64)>,
    pub probability_histogram: Vec<usize>,
}
