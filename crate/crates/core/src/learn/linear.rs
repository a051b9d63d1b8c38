//! Primal linear models trained with the Pegasos schedule.
//!
//! Each step uses step size 1/(lambda t) on one training example, followed by
//! projection onto the ball that must contain the optimum. The returned
//! weights are the best per-epoch running average of all iterates. The bias is
//! carried as a weight on a constant input and is regularized with the rest.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Hyperparams;
use crate::gaze::TaskLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    Hinge,
    Logistic,
}

impl Loss {
    fn value(self, margin: f64) -> f64 {
        match self {
            Loss::Hinge => (1.0 - margin).max(0.0),
            Loss::Logistic => {
                // ln(1 + e^-m) without overflow
                if margin > 0.0 {
                    (-margin).exp().ln_1p()
                } else {
                    -margin + margin.exp().ln_1p()
                }
            }
        }
    }

    /// -d loss / d margin
    fn slope(self, margin: f64) -> f64 {
        match self {
            Loss::Hinge => {
                if margin < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Loss::Logistic => 1.0 / (1.0 + margin.exp()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearParams {
    pub fn score(&self, z: &[f64]) -> f64 {
        self.weights.iter().zip(z).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    /// Non-negative scores are GRASP.
    pub fn predict(&self, z: &[f64]) -> TaskLabel {
        if self.score(z) >= 0.0 {
            TaskLabel::Grasp
        } else {
            TaskLabel::View
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub params: LinearParams,
    /// Regularized training objective of the weights that stopping after each
    /// epoch would return. Never increases.
    pub objective_per_epoch: Vec<f64>,
}

fn objective(loss: Loss, lambda: f64, w: &[f64], x: &[Vec<f64>], y: &[f64]) -> f64 {
    let d = w.len() - 1;
    let reg = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let s = xi.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + w[d];
            loss.value(yi * s)
        })
        .sum();
    reg + data / x.len() as f64
}

/// Fits `loss` on standardized inputs `x` with targets `y` in {-1, +1}.
///
/// Pegasos-style projected subgradient steps with step size 1/(lambda t) and a
/// regularized bias. The candidate after each epoch is the running average of
/// all iterates; it replaces the current solution only if it does not raise the
/// full training objective, since early large steps can make the average
/// temporarily worse.
pub fn fit_linear<R: Rng + ?Sized>(
    loss: Loss,
    x: &[Vec<f64>],
    y: &[f64],
    hyper: &Hyperparams,
    rng: &mut R,
) -> LinearFit {
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    let lambda = hyper.lambda;
    let radius = (2.0 * loss.value(0.0) / lambda).sqrt();

    let mut w = vec![0.0; d + 1];
    let mut avg = vec![0.0; d + 1];
    let mut order: Vec<usize> = (0..n).collect();
    let mut objective_per_epoch = Vec::with_capacity(hyper.epochs);
    let mut best = vec![0.0; d + 1];
    let mut best_value = objective(loss, lambda, &best, x, y);
    let mut t = 0u64;

    for _ in 0..hyper.epochs {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let xi = &x[i];
            let margin = y[i] * (xi.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[d]);
            let g = eta * y[i] * loss.slope(margin);
            let shrink = 1.0 - eta * lambda;
            for j in 0..d {
                w[j] = shrink * w[j] + g * xi[j];
            }
            w[d] = shrink * w[d] + g;

            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
            }
            let inv_t = 1.0 / t as f64;
            for (a, v) in avg.iter_mut().zip(&w) {
                *a += (v - *a) * inv_t;
            }
        }
        let value = objective(loss, lambda, &avg, x, y);
        if value <= best_value {
            best_value = value;
            best.copy_from_slice(&avg);
        }
        objective_per_epoch.push(best_value);
    }

    LinearFit {
        params: LinearParams {
            weights: best[..d].to_vec(),
            bias: best[d],
        },
        objective_per_epoch,
    }
}
