//! Stratified k-fold cross-validation and the repeated evaluation grid.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Classifier, ClassifierKind, Dataset, Hyperparams};
use crate::error::{Error, Result};
use crate::features::{FeatureCombination, FeatureRecord};
use crate::gaze::TaskLabel;
use crate::rng::{derive, subseed};

/// Counts with GRASP as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub true_grasp: usize,
    pub false_view: usize,
    pub false_grasp: usize,
    pub true_view: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: TaskLabel, predicted: TaskLabel) {
        match (truth, predicted) {
            (TaskLabel::Grasp, TaskLabel::Grasp) => self.true_grasp += 1,
            (TaskLabel::Grasp, _) => self.false_view += 1,
            (_, TaskLabel::Grasp) => self.false_grasp += 1,
            _ => self.true_view += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.true_grasp += other.true_grasp;
        self.false_view += other.false_view;
        self.false_grasp += other.false_grasp;
        self.true_view += other.true_view;
    }

    pub fn total(&self) -> usize {
        self.true_grasp + self.false_view + self.false_grasp + self.true_view
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// One accuracy per evaluated fold, across all repeats.
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation of `fold_accuracies`.
    pub std_accuracy: f64,
    pub n_repeats: usize,
    pub confusion: Confusion,
}

impl EvalReport {
    pub fn from_scores(fold_accuracies: Vec<f64>, n_repeats: usize, confusion: Confusion) -> Self {
        let n = fold_accuracies.len() as f64;
        let mean = fold_accuracies.iter().sum::<f64>() / n.max(1.0);
        let std = if fold_accuracies.len() > 1 {
            (fold_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            fold_accuracies,
            mean_accuracy: mean,
            std_accuracy: std,
            n_repeats,
            confusion,
        }
    }

    pub fn combine(reports: &[EvalReport]) -> Self {
        let mut scores = Vec::new();
        let mut confusion = Confusion::default();
        let mut repeats = 0;
        for r in reports {
            scores.extend_from_slice(&r.fold_accuracies);
            confusion.merge(&r.confusion);
            repeats += r.n_repeats;
        }
        Self::from_scores(scores, repeats, confusion)
    }
}

/// Splits row indices into `k` folds, dealing each class's shuffled rows
/// round-robin so fold sizes differ by at most one and every fold is stratified.
pub fn stratified_folds<R: Rng + ?Sized>(
    labels: &[TaskLabel],
    k: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k must be at least 2, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::InsufficientData(format!(
            "{} rows cannot fill {k} folds",
            labels.len()
        )));
    }
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for class in [TaskLabel::Grasp, TaskLabel::View] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "class {class} needs at least 2 rows for cross-validation"
            )));
        }
        idx.shuffle(rng);
        for i in idx {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    Ok(folds)
}

/// One fold of a cross-validation run.
#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub test_indices: Vec<usize>,
    pub model: Classifier,
    pub accuracy: f64,
    pub confusion: Confusion,
}

pub fn kfold_cv_detailed<R: Rng + ?Sized>(
    data: &Dataset,
    k: usize,
    kind: ClassifierKind,
    hyper: &Hyperparams,
    rng: &mut R,
) -> Result<Vec<FoldOutcome>> {
    let folds = stratified_folds(&data.y, k, rng)?;
    let mut out = Vec::with_capacity(k);
    for (f, test_idx) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        let model = Classifier::train(kind, &data.subset(&train_idx), hyper, rng)?;
        let mut confusion = Confusion::default();
        for &i in test_idx {
            confusion.record(data.y[i], model.predict(&data.x[i])?);
        }
        let correct = confusion.true_grasp + confusion.true_view;
        out.push(FoldOutcome {
            test_indices: test_idx.clone(),
            model,
            accuracy: correct as f64 / test_idx.len() as f64,
            confusion,
        });
    }
    Ok(out)
}

/// One repeat of stratified k-fold cross-validation.
pub fn kfold_cv<R: Rng + ?Sized>(
    data: &Dataset,
    k: usize,
    kind: ClassifierKind,
    hyper: &Hyperparams,
    rng: &mut R,
) -> Result<EvalReport> {
    let folds = kfold_cv_detailed(data, k, kind, hyper, rng)?;
    let mut confusion = Confusion::default();
    for f in &folds {
        confusion.merge(&f.confusion);
    }
    Ok(EvalReport::from_scores(
        folds.iter().map(|f| f.accuracy).collect(),
        1,
        confusion,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub combination: FeatureCombination,
    pub kind: ClassifierKind,
    /// Cross-validation on the training shapes.
    pub test1: EvalReport,
    /// Train on everything, score on the held-out shapes.
    pub test2: Option<EvalReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalTable {
    pub cells: Vec<CellReport>,
}

impl EvalTable {
    pub fn get(&self, combination: FeatureCombination, kind: ClassifierKind) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.combination == combination && c.kind == kind)
    }

    /// `combination,kind,testset,mean,std,n_repeats,n_scores` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("combination,kind,testset,mean,std,n_repeats,n_scores\n");
        for c in &self.cells {
            let sets = std::iter::once(("test1", &c.test1)).chain(c.test2.as_ref().map(|r| ("test2", r)));
            for (name, r) in sets {
                out.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{},{}\n",
                    c.combination,
                    c.kind,
                    name,
                    r.mean_accuracy,
                    r.std_accuracy,
                    r.n_repeats,
                    r.fold_accuracies.len()
                ));
            }
        }
        out
    }
}

fn cell_key(combination: FeatureCombination, kind: ClassifierKind) -> u64 {
    let c = FeatureCombination::ALL.iter().position(|&x| x == combination).unwrap_or(0) as u64;
    let k = ClassifierKind::ALL.iter().position(|&x| x == kind).unwrap_or(0) as u64;
    1 + c * 16 + k
}

const TEST2_SALT: u64 = 0x7e57_0002;

/// Repeated cross-validation over a grid of (combination, kind) cells, plus
/// held-out-shape accuracy when `test2` is given.
///
/// Every (cell, repeat) pair draws from its own random stream, so results do
/// not depend on grid order or thread count.
pub fn repeated_eval(
    train: &[FeatureRecord],
    test2: Option<&[FeatureRecord]>,
    grid: &[(FeatureCombination, ClassifierKind)],
    n_repeats: usize,
    k: usize,
    hyper: &Hyperparams,
    seed: u64,
) -> Result<EvalTable> {
    if n_repeats == 0 {
        return Err(Error::InvalidConfig("n_repeats must be positive".into()));
    }
    if let Some(test) = test2 {
        let train_shapes: HashSet<&str> = train.iter().map(|r| r.shape_id.as_str()).collect();
        if let Some(r) = test.iter().find(|r| train_shapes.contains(r.shape_id.as_str())) {
            return Err(Error::InvalidInput(format!(
                "held-out shape {} also appears in the training set",
                r.shape_id
            )));
        }
        if test.is_empty() {
            return Err(Error::InsufficientData("held-out set is empty".into()));
        }
    }

    let cells: Vec<CellReport> = grid
        .par_iter()
        .map(|&(combination, kind)| -> Result<CellReport> {
            let data = Dataset::from_records(train, combination.features())?;
            let key = cell_key(combination, kind);
            let test1 = (0..n_repeats)
                .into_par_iter()
                .map(|r| kfold_cv(&data, k, kind, hyper, &mut derive(subseed(seed, key), r as u64)))
                .collect::<Result<Vec<_>>>()?;

            let test2 = match test2 {
                Some(test) => {
                    let held_out = Dataset::from_records(test, combination.features())?;
                    let scores = (0..n_repeats)
                        .into_par_iter()
                        .map(|r| -> Result<(f64, Confusion)> {
                            let mut rng = derive(subseed(seed ^ TEST2_SALT, key), r as u64);
                            let model = Classifier::train(kind, &data, hyper, &mut rng)?;
                            let mut confusion = Confusion::default();
                            for (x, &y) in held_out.x.iter().zip(&held_out.y) {
                                confusion.record(y, model.predict(x)?);
                            }
                            let acc = (confusion.true_grasp + confusion.true_view) as f64
                                / held_out.len() as f64;
                            Ok((acc, confusion))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let mut confusion = Confusion::default();
                    scores.iter().for_each(|(_, c)| confusion.merge(c));
                    Some(EvalReport::from_scores(
                        scores.iter().map(|(a, _)| *a).collect(),
                        n_repeats,
                        confusion,
                    ))
                }
                None => None,
            };

            Ok(CellReport {
                combination,
                kind,
                test1: EvalReport::combine(&test1),
                test2,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EvalTable { cells })
}

/// The full 5 x 4 grid.
pub fn full_grid() -> Vec<(FeatureCombination, ClassifierKind)> {
    FeatureCombination::ALL
        .iter()
        .flat_map(|&c| ClassifierKind::ALL.iter().map(move |&k| (c, k)))
        .collect()
}
