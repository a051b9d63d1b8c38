//! Classifiers over fixation features and their evaluation protocol.
//!
//! Four kinds are supported: k-nearest neighbours, a linear SVM (hinge loss),
//! a logistic-loss linear model trained by SGD, and a CART decision tree. All
//! of them see features standardized with statistics from their own training
//! data. GRASP is the positive class.

mod cv;
mod knn;
mod linear;
mod tree;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Feature, FeatureCombination, FeatureRecord, FeatureVector};
use crate::gaze::TaskLabel;

pub use cv::{
    full_grid, kfold_cv, kfold_cv_detailed, repeated_eval, stratified_folds, CellReport, Confusion,
    EvalReport, EvalTable, FoldOutcome,
};
pub use knn::KnnParams;
pub use linear::{fit_linear, LinearFit, LinearParams, Loss};
pub use tree::{Node, TreeParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassifierKind {
    Knn,
    SvmLinear,
    SgdLogistic,
    DecisionTree,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::Knn,
        ClassifierKind::SvmLinear,
        ClassifierKind::SgdLogistic,
        ClassifierKind::DecisionTree,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::SvmLinear => "svm",
            ClassifierKind::SgdLogistic => "sgd",
            ClassifierKind::DecisionTree => "dtree",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(Self::Knn),
            "svm" | "svm_linear" => Ok(Self::SvmLinear),
            "sgd" | "sgd_logistic" => Ok(Self::SgdLogistic),
            "dtree" | "tree" | "decision_tree" => Ok(Self::DecisionTree),
            _ => Err(Error::InvalidInput(format!(
                "unknown classifier {s:?} (expected knn, svm, sgd or dtree)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub knn_k: usize,
    pub lambda: f64,
    pub epochs: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            knn_k: 5,
            lambda: 1e-3,
            epochs: 200,
            max_depth: 5,
            min_leaf: 2,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.knn_k == 0 || self.epochs == 0 || self.min_leaf == 0 {
            return Err(Error::InvalidConfig(
                "knn_k, epochs and min_leaf must be positive".into(),
            ));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be positive, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Labeled feature vectors of a common dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<TaskLabel>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<TaskLabel>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "{} vectors but {} labels",
                x.len(),
                y.len()
            )));
        }
        if let Some(first) = x.first() {
            let dim = first.len();
            if let Some(bad) = x.iter().find(|v| v.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: bad.len(),
                });
            }
        }
        if y.contains(&TaskLabel::Unlabeled) {
            return Err(Error::InvalidInput("dataset contains unlabeled rows".into()));
        }
        Ok(Self { x, y })
    }

    pub fn from_records(records: &[FeatureRecord], features: &[Feature]) -> Result<Self> {
        Self::new(
            records.iter().map(|r| r.features().select(features)).collect(),
            records.iter().map(|r| r.task_label).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    pub fn count(&self, label: TaskLabel) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }

    /// Same rows with labels shuffled.
    pub fn with_shuffled_labels<R: Rng + ?Sized>(&self, rng: &mut R) -> Dataset {
        use rand::seq::SliceRandom;
        let mut y = self.y.clone();
        y.shuffle(rng);
        Dataset { x: self.x.clone(), y }
    }
}

/// Per-feature standardization learned on training data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScale {
    pub mean: f64,
    pub std: f64,
}

impl FeatureScale {
    /// Mean and population std per column; a zero std becomes 1.
    pub fn fit(x: &[Vec<f64>]) -> Vec<FeatureScale> {
        let n = x.len() as f64;
        let dim = x.first().map_or(0, Vec::len);
        (0..dim)
            .map(|j| {
                let mean = x.iter().map(|v| v[j]).sum::<f64>() / n;
                let var = x.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / n;
                let std = var.sqrt();
                FeatureScale {
                    mean,
                    std: if std > 0.0 && std.is_finite() { std } else { 1.0 },
                }
            })
            .collect()
    }

    pub fn apply(scales: &[FeatureScale], v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(scales)
            .map(|(x, s)| (x - s.mean) / s.std)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParams {
    Knn(KnnParams),
    Linear(LinearParams),
    Tree(TreeParams),
}

/// A fitted classifier independent of which features it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub kind: ClassifierKind,
    pub standardization: Vec<FeatureScale>,
    pub parameters: ModelParams,
}

fn sign_label(y: TaskLabel) -> f64 {
    if y == TaskLabel::Grasp {
        1.0
    } else {
        -1.0
    }
}

impl Classifier {
    pub fn train<R: Rng + ?Sized>(
        kind: ClassifierKind,
        data: &Dataset,
        hyper: &Hyperparams,
        rng: &mut R,
    ) -> Result<Self> {
        hyper.validate()?;
        if data.count(TaskLabel::Grasp) == 0 || data.count(TaskLabel::View) == 0 {
            return Err(Error::InvalidInput(
                "training data must contain both GRASP and VIEW".into(),
            ));
        }
        if data.dim() == 0 {
            return Err(Error::InvalidInput("feature vectors are empty".into()));
        }
        let standardization = FeatureScale::fit(&data.x);
        let z: Vec<Vec<f64>> = data
            .x
            .iter()
            .map(|v| FeatureScale::apply(&standardization, v))
            .collect();
        let parameters = match kind {
            ClassifierKind::Knn => ModelParams::Knn(KnnParams::fit(&z, &data.y, hyper.knn_k)),
            ClassifierKind::SvmLinear | ClassifierKind::SgdLogistic => {
                let loss = if kind == ClassifierKind::SvmLinear {
                    Loss::Hinge
                } else {
                    Loss::Logistic
                };
                let y: Vec<f64> = data.y.iter().map(|&l| sign_label(l)).collect();
                ModelParams::Linear(fit_linear(loss, &z, &y, hyper, rng).params)
            }
            ClassifierKind::DecisionTree => ModelParams::Tree(TreeParams::fit(
                &z,
                &data.y,
                hyper.max_depth,
                hyper.min_leaf,
            )),
        };
        Ok(Self {
            kind,
            standardization,
            parameters,
        })
    }

    pub fn dim(&self) -> usize {
        self.standardization.len()
    }

    pub fn predict(&self, v: &[f64]) -> Result<TaskLabel> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        let z = FeatureScale::apply(&self.standardization, v);
        Ok(match &self.parameters {
            ModelParams::Knn(p) => p.predict(&z),
            ModelParams::Linear(p) => p.predict(&z),
            ModelParams::Tree(p) => p.predict(&z),
        })
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let mut correct = 0usize;
        for (x, &y) in data.x.iter().zip(&data.y) {
            if self.predict(x)? == y {
                correct += 1;
            }
        }
        Ok(correct as f64 / data.len().max(1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if self.standardization.iter().any(|s| !s.std.is_finite() || s.std <= 0.0) {
            return Err(Error::InvalidInput("standardization std must be positive".into()));
        }
        let consistent = match (&self.parameters, self.kind) {
            (ModelParams::Knn(p), ClassifierKind::Knn) => {
                p.k > 0 && p.points.len() == p.labels.len() && p.points.iter().all(|v| v.len() == dim)
            }
            (ModelParams::Linear(p), ClassifierKind::SvmLinear | ClassifierKind::SgdLogistic) => {
                p.weights.len() == dim
            }
            (ModelParams::Tree(p), ClassifierKind::DecisionTree) => p.is_well_formed(dim),
            _ => false,
        };
        if !consistent {
            return Err(Error::InvalidInput(format!(
                "parameters do not match a {} model of dimension {dim}",
                self.kind
            )));
        }
        Ok(())
    }
}

/// A persisted classifier bound to one feature combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub combination: FeatureCombination,
    #[serde(flatten)]
    pub classifier: Classifier,
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        self.classifier.kind
    }

    pub fn predict(&self, v: &[f64]) -> Result<TaskLabel> {
        self.classifier.predict(v)
    }

    pub fn predict_features(&self, fv: &FeatureVector) -> Result<TaskLabel> {
        self.classifier.predict(&fv.project(self.combination))
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported model format version {}",
                self.format_version
            )));
        }
        if self.classifier.dim() != self.combination.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.combination.dim(),
                actual: self.classifier.dim(),
            });
        }
        self.classifier.validate()
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let model: TrainedModel = crate::io::read_json(path)?;
        model.validate()?;
        Ok(model)
    }
}

/// Trains `kind` on `records` projected onto `combination`.
pub fn train<R: Rng + ?Sized>(
    kind: ClassifierKind,
    combination: FeatureCombination,
    records: &[FeatureRecord],
    hyper: &Hyperparams,
    rng: &mut R,
) -> Result<TrainedModel> {
    let data = Dataset::from_records(records, combination.features())?;
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        combination,
        classifier: Classifier::train(kind, &data, hyper, rng)?,
    })
}
