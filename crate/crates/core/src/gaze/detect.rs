use serde::{Deserialize, Serialize};

use super::{Fixation, GazeSample};
use crate::error::{Error, Result};

/// Dispersion-threshold fixation detector settings.
///
/// The dispersion bound is given in degrees of visual angle and converted to
/// scene pixels with `px_per_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixationDetectorConfig {
    pub dispersion_max_deg: f64,
    pub px_per_deg: f64,
    pub dur_min_ms: f64,
    pub dur_max_ms: f64,
    pub min_confidence: f64,
}

impl Default for FixationDetectorConfig {
    fn default() -> Self {
        Self {
            dispersion_max_deg: 3.01,
            px_per_deg: 30.0,
            dur_min_ms: 80.0,
            dur_max_ms: 400.0,
            min_confidence: 0.6,
        }
    }
}

impl FixationDetectorConfig {
    pub fn dispersion_max_px(&self) -> f64 {
        self.dispersion_max_deg * self.px_per_deg
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("dispersion_max_deg", self.dispersion_max_deg),
            ("px_per_deg", self.px_per_deg),
            ("dur_min_ms", self.dur_min_ms),
            ("dur_max_ms", self.dur_max_ms),
            ("min_confidence", self.min_confidence),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.dur_min_ms >= self.dur_max_ms {
            return Err(Error::InvalidConfig(format!(
                "dur_min_ms ({}) must be below dur_max_ms ({})",
                self.dur_min_ms, self.dur_max_ms
            )));
        }
        Ok(())
    }
}

/// Greedy dispersion-threshold (I-DT) fixation detection.
///
/// Low-confidence samples are dropped first. A window grows from the current
/// start sample while every pairwise distance stays within the dispersion
/// bound and its span stays within `dur_max_ms`. A window spanning at least
/// `dur_min_ms` becomes a fixation and scanning resumes after it; otherwise the
/// start advances by one sample.
pub fn detect_fixations(
    samples: &[GazeSample],
    config: &FixationDetectorConfig,
) -> Result<Vec<Fixation>> {
    config.validate()?;
    if let Some(w) = samples.windows(2).find(|w| w[1].t_ms < w[0].t_ms) {
        return Err(Error::OutOfOrder {
            previous: w[0].t_ms,
            current: w[1].t_ms,
        });
    }

    let kept: Vec<&GazeSample> = samples
        .iter()
        .filter(|s| s.confidence >= config.min_confidence)
        .collect();
    let max_px = config.dispersion_max_px();
    let mut fixations = Vec::new();

    let mut start = 0;
    while start < kept.len() {
        let t0 = kept[start].t_ms;
        let mut end = start + 1;
        while end < kept.len() {
            let next = kept[end];
            if next.t_ms - t0 > config.dur_max_ms {
                break;
            }
            let p = next.position();
            if kept[start..end]
                .iter()
                .any(|s| s.position().distance(p) > max_px)
            {
                break;
            }
            end += 1;
        }

        let window = &kept[start..end];
        let duration = window[window.len() - 1].t_ms - t0;
        if duration >= config.dur_min_ms {
            let n = window.len() as f64;
            let (sx, sy) = window
                .iter()
                .fold((0.0, 0.0), |(ax, ay), s| (ax + s.x, ay + s.y));
            fixations.push(Fixation {
                t_start_ms: t0,
                duration_ms: duration,
                x: sx / n,
                y: sy / n,
            });
            start = end;
        } else {
            start += 1;
        }
    }
    Ok(fixations)
}
