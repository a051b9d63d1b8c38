//! Online sliding-window intention recognition.
//!
//! A [`Session`] buffers gaze samples for one object. Window boundaries start
//! one full window after the first sample and step by `hop_ms`. A boundary
//! `T` is processed once a sample strictly later than `T` arrives, so every
//! sample stamped at or before `T` is already buffered. Each boundary detects
//! fixations over the trailing buffer, keeps those whose midpoint falls in
//! `[T - window_ms, T]`, and classifies their features. A GRASP decision fires
//! after `consecutive_required` GRASP windows in a row and is followed by a
//! refractory pause during which no windows are classified.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{self, FeatureCombination, FeatureRecord, FeatureVector};
use crate::gaze::{
    detect_fixations, Fixation, FixationDetectorConfig, GazeSample, ObjectContext, TaskLabel, Trial,
};
use crate::learn::{self, ClassifierKind, Hyperparams, TrainedModel};
use crate::rng::{derive, subseed};
use crate::synth::{rasterize_for, Generator, SynthConfig};

/// Sample rate used when replaying fixation sequences as gaze streams.
pub const REPLAY_RATE_HZ: f64 = 120.0;
/// Pause inserted between repetitions of a looped trial.
pub const REPLAY_GAP_MS: f64 = 50.0;
/// Training trials per class for [`synthetic_default_model`].
pub const DEFAULT_MODEL_TRIALS_PER_CLASS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowConfig {
    pub window_ms: f64,
    pub hop_ms: f64,
    pub min_fixations: usize,
    pub consecutive_required: usize,
    pub refractory_ms: f64,
    pub detector: FixationDetectorConfig,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            window_ms: 3000.0,
            hop_ms: 500.0,
            min_fixations: 2,
            consecutive_required: 2,
            refractory_ms: 2000.0,
            detector: FixationDetectorConfig::default(),
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_ms.is_finite() && self.window_ms > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "window_ms must be positive, got {}",
                self.window_ms
            )));
        }
        if !(self.hop_ms.is_finite() && self.hop_ms > 0.0 && self.hop_ms <= self.window_ms) {
            return Err(Error::InvalidConfig(format!(
                "hop_ms must be in (0, window_ms], got {}",
                self.hop_ms
            )));
        }
        if self.min_fixations == 0 {
            return Err(Error::InvalidConfig("min_fixations must be at least 1".into()));
        }
        if self.consecutive_required == 0 {
            return Err(Error::InvalidConfig(
                "consecutive_required must be at least 1".into(),
            ));
        }
        if !(self.refractory_ms.is_finite() && self.refractory_ms >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "refractory_ms must be non-negative, got {}",
                self.refractory_ms
            )));
        }
        self.detector.validate()
    }

    /// Latest time by which a stream that is GRASP from its first sample fires.
    pub fn fire_deadline_ms(&self) -> f64 {
        self.window_ms + self.consecutive_required as f64 * self.hop_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum WindowLabel {
    Grasp,
    View,
    Insufficient,
}

impl From<TaskLabel> for WindowLabel {
    fn from(label: TaskLabel) -> Self {
        match label {
            TaskLabel::Grasp => WindowLabel::Grasp,
            TaskLabel::View => WindowLabel::View,
            TaskLabel::Unlabeled => WindowLabel::Insufficient,
        }
    }
}

/// The verdict for one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentionEvent {
    /// Window close time.
    pub t_ms: f64,
    pub label: WindowLabel,
    pub window_features: Option<FeatureVector>,
    /// Set on the window that completes the consecutive-GRASP run.
    pub fired: bool,
    /// Fixations whose midpoint falls inside the window.
    pub fixations: Vec<Fixation>,
}

/// One live stream against one object and model.
#[derive(Debug, Clone)]
pub struct Session {
    context: ObjectContext,
    model: Arc<TrainedModel>,
    config: WindowConfig,
    buffer: VecDeque<GazeSample>,
    last_t: Option<f64>,
    next_boundary: f64,
    boundary_index: u64,
    origin: f64,
    streak: usize,
    paused_until: f64,
}

impl Session {
    pub fn new(context: ObjectContext, model: Arc<TrainedModel>, config: WindowConfig) -> Result<Self> {
        context.validate()?;
        model.validate()?;
        config.validate()?;
        Ok(Self {
            context,
            model,
            config,
            buffer: VecDeque::new(),
            last_t: None,
            next_boundary: f64::INFINITY,
            boundary_index: 0,
            origin: 0.0,
            streak: 0,
            paused_until: f64::NEG_INFINITY,
        })
    }

    pub fn config(&self) -> &WindowConfig {
        &self.config
    }

    pub fn context(&self) -> &ObjectContext {
        &self.context
    }

    pub fn model(&self) -> &TrainedModel {
        &self.model
    }

    /// Replaces the object context; later windows use the new one.
    pub fn set_context(&mut self, context: ObjectContext) -> Result<()> {
        context.validate()?;
        self.context = context;
        Ok(())
    }

    /// Feeds one sample and returns the events of every boundary it crosses.
    pub fn push_sample(&mut self, sample: GazeSample) -> Result<Vec<IntentionEvent>> {
        sample.validate()?;
        let mut events = Vec::new();
        match self.last_t {
            None => {
                self.origin = sample.t_ms;
                self.boundary_index = 0;
                self.next_boundary = sample.t_ms + self.config.window_ms;
            }
            Some(prev) if sample.t_ms < prev => {
                return Err(Error::OutOfOrder {
                    previous: prev,
                    current: sample.t_ms,
                });
            }
            Some(_) => {
                while self.next_boundary < sample.t_ms {
                    let t = self.next_boundary;
                    if let Some(event) = self.close_window(t)? {
                        events.push(event);
                    }
                    self.boundary_index += 1;
                    // Boundaries are computed from the origin to avoid drift.
                    self.next_boundary = self.origin
                        + self.config.window_ms
                        + self.boundary_index as f64 * self.config.hop_ms;
                }
                self.prune();
            }
        }
        self.last_t = Some(sample.t_ms);
        self.buffer.push_back(sample);
        Ok(events)
    }

    /// Feeds a batch. Results equal pushing the samples one at a time.
    ///
    /// On error, samples before the offending one remain applied.
    pub fn push_samples(&mut self, samples: &[GazeSample]) -> Result<Vec<IntentionEvent>> {
        let mut events = Vec::new();
        for &s in samples {
            events.extend(self.push_sample(s)?);
        }
        Ok(events)
    }

    fn lookback_ms(&self) -> f64 {
        self.config.window_ms + self.config.detector.dur_max_ms
    }

    fn prune(&mut self) {
        let keep_from = self.next_boundary - self.lookback_ms();
        while self.buffer.front().is_some_and(|s| s.t_ms < keep_from) {
            self.buffer.pop_front();
        }
    }

    fn close_window(&mut self, t: f64) -> Result<Option<IntentionEvent>> {
        if t < self.paused_until {
            return Ok(None);
        }
        let from = t - self.lookback_ms();
        let samples: Vec<GazeSample> = self
            .buffer
            .iter()
            .filter(|s| s.t_ms >= from && s.t_ms <= t)
            .copied()
            .collect();
        let start = t - self.config.window_ms;
        let fixations: Vec<Fixation> = detect_fixations(&samples, &self.config.detector)?
            .into_iter()
            .filter(|f| (start..=t).contains(&f.midpoint_ms()))
            .collect();

        if fixations.len() < self.config.min_fixations {
            self.streak = 0;
            return Ok(Some(IntentionEvent {
                t_ms: t,
                label: WindowLabel::Insufficient,
                window_features: None,
                fired: false,
                fixations,
            }));
        }

        let fv = features::compute(&fixations, &self.context)?;
        let label = WindowLabel::from(self.model.predict_features(&fv)?);
        let mut fired = false;
        if label == WindowLabel::Grasp {
            self.streak += 1;
            if self.streak >= self.config.consecutive_required {
                fired = true;
                self.streak = 0;
                self.paused_until = t + self.config.refractory_ms;
            }
        } else {
            self.streak = 0;
        }
        Ok(Some(IntentionEvent {
            t_ms: t,
            label,
            window_features: Some(fv),
            fired,
            fixations,
        }))
    }
}

/// The trial as the first window of a replayed stream sees it: the trial is
/// looped to fill `window_ms`, rasterized at [`REPLAY_RATE_HZ`] and its
/// fixations re-detected. Nearby fixations merge under the detector, which
/// lowers VAR relative to the generated sequence.
pub fn as_streamed(trial: &Trial, config: &WindowConfig) -> Result<Trial> {
    let samples = rasterize_for(trial, REPLAY_RATE_HZ, config.window_ms, REPLAY_GAP_MS);
    let start = samples.first().map_or(0.0, |s| s.t_ms);
    let fixations = detect_fixations(&samples, &config.detector)?
        .into_iter()
        .filter(|f| f.midpoint_ms() <= start + config.window_ms)
        .collect();
    Ok(Trial {
        fixations,
        ..trial.clone()
    })
}

/// The default streaming model: Combination 4 with KNN, trained on
/// synthetic trials seen through [`as_streamed`] so that training features
/// match what a live window produces.
pub fn synthetic_default_model(seed: u64, config: &WindowConfig) -> Result<TrainedModel> {
    let synth = SynthConfig {
        n_per_class: DEFAULT_MODEL_TRIALS_PER_CLASS,
        ..SynthConfig::with_seed(subseed(seed, 0x5747_0001))
    };
    let data = Generator::new(synth)?.generate_dataset()?;
    let records = data
        .train
        .iter()
        .map(|t| FeatureRecord::from_trial(&as_streamed(t, config)?))
        .collect::<Result<Vec<_>>>()?;
    learn::train(
        ClassifierKind::Knn,
        FeatureCombination::C4,
        &records,
        &Hyperparams::default(),
        &mut derive(seed, 0),
    )
}
