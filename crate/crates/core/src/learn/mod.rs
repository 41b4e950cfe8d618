//! PCA reduction and a linear soft-margin SVM for rejecting false detections.

mod model;
mod pca;
mod svm;

pub use model::{SignClassifier, TrainConfig};
pub use pca::{covariance, pca_fit, pca_project, pca_reconstruct, PcaModel};
pub use svm::{svm_decide, svm_objective, svm_train, SvmModel};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// `+1`
    Sign,
    /// `-1`
    NonSign,
}

impl Label {
    pub fn value(self) -> i32 {
        match self {
            Label::Sign => 1,
            Label::NonSign => -1,
        }
    }

    pub fn sign(self) -> f64 {
        self.value() as f64
    }

    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            1 => Some(Label::Sign),
            -1 => Some(Label::NonSign),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: Label,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training data contains a single class")]
    SingleClassData,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("model file line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },
}
