//! Grasping-vs-viewing intention recognition from 2D gaze streams.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`gaze::detect_fixations`] turns raw [`GazeSample`]s into dispersion-bounded
//!    [`Fixation`]s.
//! 2. [`features`] measures how those fixations relate to an object's centroid
//!    and its thumb/index grasp points (ADF2C, ADF2T, ADF2I) and how concentrated
//!    they are (VAR).
//! 3. [`learn`] trains KNN, linear SVM, logistic SGD and decision-tree classifiers
//!    over feature combinations and evaluates them with repeated stratified k-fold
//!    cross-validation. [`stats`] runs permutation F-tests between tasks.
//! 4. [`stream`] classifies a live gaze stream over a sliding window, and
//!    [`service`] hosts such sessions over a websocket.
//!
//! [`synth`] generates labeled trials whose feature statistics match published
//! human measurements, so every stage can be exercised without an eye tracker.
//!
//! Runnable examples for each capability live in `examples/`.

pub mod cli;
pub mod error;
pub mod features;
pub mod gaze;
pub mod io;
pub mod learn;
pub mod rng;
pub mod service;
pub mod stats;
pub mod stream;
pub mod synth;

pub use error::{Error, Result};
pub use features::{Feature, FeatureCombination, FeatureVector};
pub use gaze::{
    detect_fixations, Fixation, FixationDetectorConfig, GazeSample, ObjectContext, Point,
    TaskLabel, Trial,
};
pub use learn::{ClassifierKind, EvalReport, TrainedModel};
pub use stream::{IntentionEvent, Session, WindowConfig, WindowLabel};
