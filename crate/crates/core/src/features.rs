//! Fixation features measured against an object's centroid and grasp points.
//!
//! * ADF2C: mean distance from the fixations to the object centroid.
//! * ADF2T / ADF2I: mean distance to the thumb / index-finger grasp point.
//! * VAR: population variance of the distances from each fixation to the mean
//!   fixation position. Small values mean concentrated gaze.
//!
//! The object context is treated as constant over the fixations passed in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaze::{Fixation, GraspAxis, ObjectContext, Point, TaskLabel, Trial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Feature {
    Adf2c,
    Adf2i,
    Adf2t,
    Var,
}

impl Feature {
    /// Canonical projection order.
    pub const ALL: [Feature; 4] = [Feature::Adf2c, Feature::Adf2i, Feature::Adf2t, Feature::Var];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Adf2c => "ADF2C",
            Feature::Adf2i => "ADF2I",
            Feature::Adf2t => "ADF2T",
            Feature::Var => "VAR",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The five feature subsets compared for intention recognition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureCombination {
    /// ADF2T + VAR
    C1,
    /// ADF2I + VAR
    C2,
    /// ADF2C + ADF2T + VAR
    C3,
    /// ADF2C + ADF2I + VAR
    C4,
    /// ADF2C + ADF2I + ADF2T + VAR
    C5,
}

impl FeatureCombination {
    pub const ALL: [FeatureCombination; 5] = [
        FeatureCombination::C1,
        FeatureCombination::C2,
        FeatureCombination::C3,
        FeatureCombination::C4,
        FeatureCombination::C5,
    ];

    /// Members in canonical order.
    pub fn features(self) -> &'static [Feature] {
        use Feature::*;
        match self {
            FeatureCombination::C1 => &[Adf2t, Var],
            FeatureCombination::C2 => &[Adf2i, Var],
            FeatureCombination::C3 => &[Adf2c, Adf2t, Var],
            FeatureCombination::C4 => &[Adf2c, Adf2i, Var],
            FeatureCombination::C5 => &[Adf2c, Adf2i, Adf2t, Var],
        }
    }

    pub fn dim(self) -> usize {
        self.features().len()
    }
}

impl fmt::Display for FeatureCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for FeatureCombination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(Self::C1),
            "c2" => Ok(Self::C2),
            "c3" => Ok(Self::C3),
            "c4" => Ok(Self::C4),
            "c5" => Ok(Self::C5),
            _ => Err(Error::InvalidInput(format!(
                "unknown feature combination {s:?} (expected c1..c5)"
            ))),
        }
    }
}

/// All four features of one trial or window, plus the fixation count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub adf2c: f64,
    pub adf2t: f64,
    pub adf2i: f64,
    pub var: f64,
    pub n_fix: usize,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Adf2c => self.adf2c,
            Feature::Adf2i => self.adf2i,
            Feature::Adf2t => self.adf2t,
            Feature::Var => self.var,
        }
    }

    pub fn select(&self, features: &[Feature]) -> Vec<f64> {
        features.iter().map(|&f| self.get(f)).collect()
    }

    pub fn project(&self, combination: FeatureCombination) -> Vec<f64> {
        self.select(combination.features())
    }
}

fn require_fixations(fixations: &[Fixation]) -> Result<()> {
    if fixations.is_empty() {
        return Err(Error::InsufficientData(
            "at least one fixation is required".into(),
        ));
    }
    Ok(())
}

fn mean_distance(fixations: &[Fixation], target: Point) -> f64 {
    let sum: f64 = fixations.iter().map(|f| f.position().distance(target)).sum();
    sum / fixations.len() as f64
}

/// Mean distance from the fixations to the object centroid.
pub fn adf2c(fixations: &[Fixation], centroid: Point) -> Result<f64> {
    require_fixations(fixations)?;
    Ok(mean_distance(fixations, centroid))
}

/// Mean distances to the thumb and index grasp points, as `(adf2t, adf2i)`.
pub fn grasp_distances(fixations: &[Fixation], context: &ObjectContext) -> Result<(f64, f64)> {
    require_fixations(fixations)?;
    Ok((
        mean_distance(fixations, context.grasp_thumb),
        mean_distance(fixations, context.grasp_index),
    ))
}

/// Population variance of fixation distances to the mean fixation position.
pub fn var_of_distances(fixations: &[Fixation]) -> Result<f64> {
    require_fixations(fixations)?;
    let n = fixations.len() as f64;
    let (sx, sy) = fixations
        .iter()
        .fold((0.0, 0.0), |(ax, ay), f| (ax + f.x, ay + f.y));
    let center = Point::new(sx / n, sy / n);
    let dists: Vec<f64> = fixations
        .iter()
        .map(|f| f.position().distance(center))
        .collect();
    let mean = dists.iter().sum::<f64>() / n;
    Ok(dists.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n)
}

pub fn compute(fixations: &[Fixation], context: &ObjectContext) -> Result<FeatureVector> {
    let adf2c = adf2c(fixations, context.centroid)?;
    let (adf2t, adf2i) = grasp_distances(fixations, context)?;
    Ok(FeatureVector {
        adf2c,
        adf2t,
        adf2i,
        var: var_of_distances(fixations)?,
        n_fix: fixations.len(),
    })
}

/// Features of a trial projected onto `combination` in canonical order.
pub fn extract(trial: &Trial, combination: FeatureCombination) -> Result<Vec<f64>> {
    trial.object.validate()?;
    Ok(compute(&trial.fixations, &trial.object)?.project(combination))
}

/// One line of a feature dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub trial_id: String,
    pub task_label: TaskLabel,
    pub adf2c: f64,
    pub adf2i: f64,
    pub adf2t: f64,
    pub var: f64,
    pub n_fix: usize,
    pub shape_id: String,
    pub grasp_axis: GraspAxis,
}

impl FeatureRecord {
    pub fn from_trial(trial: &Trial) -> Result<Self> {
        trial.validate()?;
        let fv = compute(&trial.fixations, &trial.object)?;
        Ok(Self {
            trial_id: trial.trial_id.clone(),
            task_label: trial.task_label,
            adf2c: fv.adf2c,
            adf2i: fv.adf2i,
            adf2t: fv.adf2t,
            var: fv.var,
            n_fix: fv.n_fix,
            shape_id: trial.object.shape_id.clone(),
            grasp_axis: trial.object.grasp_axis(),
        })
    }

    pub fn features(&self) -> FeatureVector {
        FeatureVector {
            adf2c: self.adf2c,
            adf2t: self.adf2t,
            adf2i: self.adf2i,
            var: self.var,
            n_fix: self.n_fix,
        }
    }
}
