//! Gaze stream model: raw samples, fixations, and the object a trial is about.

mod detect;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use detect::{detect_fixations, FixationDetectorConfig};

/// A position in scene-camera pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// One timestamped gaze point as delivered by the tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    /// Milliseconds since session start.
    pub t_ms: f64,
    pub x: f64,
    pub y: f64,
    /// Tracker confidence in `[0, 1]`.
    pub confidence: f64,
}

impl GazeSample {
    pub fn new(t_ms: f64, x: f64, y: f64, confidence: f64) -> Self {
        Self {
            t_ms,
            x,
            y,
            confidence,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_ms.is_finite() && self.t_ms >= 0.0) {
            return Err(Error::InvalidInput(format!("bad timestamp {}", self.t_ms)));
        }
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite position at t_ms {}",
                self.t_ms
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::InvalidInput(format!(
                "confidence {} outside [0, 1] at t_ms {}",
                self.confidence, self.t_ms
            )));
        }
        Ok(())
    }
}

/// A stable-gaze event. Position is the mean of its member samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    pub t_start_ms: f64,
    pub duration_ms: f64,
    pub x: f64,
    pub y: f64,
}

impl Fixation {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn midpoint_ms(&self) -> f64 {
        self.t_start_ms + self.duration_ms / 2.0
    }

    pub fn end_ms(&self) -> f64 {
        self.t_start_ms + self.duration_ms
    }
}

/// Object centroid plus the thumb and index-finger grasp points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectContext {
    pub centroid: Point,
    pub grasp_thumb: Point,
    pub grasp_index: Point,
    pub shape_id: String,
}

/// Direction along which the fingers close on the object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraspAxis {
    Horizontal,
    Vertical,
}

impl ObjectContext {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("centroid", self.centroid),
            ("grasp_thumb", self.grasp_thumb),
            ("grasp_index", self.grasp_index),
        ] {
            if !p.is_finite() {
                return Err(Error::InvalidInput(format!("{name} is not finite")));
            }
        }
        if self.grasp_thumb == self.grasp_index {
            return Err(Error::InvalidInput(
                "grasp_thumb and grasp_index coincide".into(),
            ));
        }
        Ok(())
    }

    /// Horizontal when the grasp points differ more in x than in y.
    pub fn grasp_axis(&self) -> GraspAxis {
        let dx = (self.grasp_index.x - self.grasp_thumb.x).abs();
        let dy = (self.grasp_index.y - self.grasp_thumb.y).abs();
        if dx >= dy {
            GraspAxis::Horizontal
        } else {
            GraspAxis::Vertical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TaskLabel {
    Grasp,
    View,
    Unlabeled,
}

impl std::fmt::Display for TaskLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskLabel::Grasp => "GRASP",
            TaskLabel::View => "VIEW",
            TaskLabel::Unlabeled => "UNLABELED",
        })
    }
}

/// One grasp or view attempt on one object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub trial_id: String,
    pub participant_id: String,
    pub task_label: TaskLabel,
    pub fixations: Vec<Fixation>,
    pub object: ObjectContext,
}

impl Trial {
    pub fn validate(&self) -> Result<()> {
        self.object.validate()?;
        if self
            .fixations
            .windows(2)
            .any(|w| w[1].t_start_ms < w[0].t_start_ms)
        {
            return Err(Error::InvalidInput(format!(
                "trial {}: fixations not ordered by t_start_ms",
                self.trial_id
            )));
        }
        Ok(())
    }

    /// Validation for trials used as training data.
    pub fn validate_labeled(&self) -> Result<()> {
        self.validate()?;
        if self.task_label == TaskLabel::Unlabeled {
            return Err(Error::InvalidInput(format!(
                "trial {} is unlabeled",
                self.trial_id
            )));
        }
        if self.fixations.is_empty() {
            return Err(Error::InsufficientData(format!(
                "trial {} has no fixations",
                self.trial_id
            )));
        }
        Ok(())
    }
}
