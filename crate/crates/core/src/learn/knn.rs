use serde::{Deserialize, Serialize};

use crate::gaze::TaskLabel;

/// Memorized standardized training vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<TaskLabel>,
}

impl KnnParams {
    pub(crate) fn fit(points: &[Vec<f64>], labels: &[TaskLabel], k: usize) -> Self {
        Self {
            k,
            points: points.to_vec(),
            labels: labels.to_vec(),
        }
    }

    /// Majority vote of the `k` nearest points (Euclidean). Equal distances
    /// keep training order; a split vote goes to GRASP.
    pub fn predict(&self, z: &[f64]) -> TaskLabel {
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d2: f64 = p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        let k = self.k.min(dist.len());
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let grasp = dist[..k]
            .iter()
            .filter(|(_, i)| self.labels[*i] == TaskLabel::Grasp)
            .count();
        if 2 * grasp >= k {
            TaskLabel::Grasp
        } else {
            TaskLabel::View
        }
    }
}
