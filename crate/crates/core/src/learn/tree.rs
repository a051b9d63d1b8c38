//! CART with Gini impurity, axis-aligned binary splits at midpoints.

use serde::{Deserialize, Serialize};

use crate::gaze::TaskLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: TaskLabel,
    },
}

/// Flattened tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub nodes: Vec<Node>,
}

fn gini(grasp: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = grasp as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn majority(labels: &[TaskLabel], idx: &[usize]) -> TaskLabel {
    let grasp = idx.iter().filter(|&&i| labels[i] == TaskLabel::Grasp).count();
    if 2 * grasp >= idx.len() {
        TaskLabel::Grasp
    } else {
        TaskLabel::View
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [TaskLabel],
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    /// Best split as (weighted impurity, feature, threshold).
    fn best_split(&self, idx: &[usize]) -> Option<(f64, usize, f64)> {
        let n = idx.len();
        let dim = self.x[idx[0]].len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.to_vec();
        let total_grasp = idx.iter().filter(|&&i| self.y[i] == TaskLabel::Grasp).count();
        for f in 0..dim {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let mut left_grasp = 0;
            for split in 1..n {
                if self.y[sorted[split - 1]] == TaskLabel::Grasp {
                    left_grasp += 1;
                }
                if split < self.min_leaf || n - split < self.min_leaf {
                    continue;
                }
                let lo = self.x[sorted[split - 1]][f];
                let hi = self.x[sorted[split]][f];
                if lo >= hi {
                    continue;
                }
                let impurity = (split as f64 * gini(left_grasp, split)
                    + (n - split) as f64 * gini(total_grasp - left_grasp, n - split))
                    / n as f64;
                if best.is_none_or(|(b, _, _)| impurity < b) {
                    best = Some((impurity, f, 0.5 * (lo + hi)));
                }
            }
        }
        best
    }

    fn build(&mut self, idx: &[usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            label: majority(self.y, idx),
        });
        let grasp = idx.iter().filter(|&&i| self.y[i] == TaskLabel::Grasp).count();
        let parent = gini(grasp, idx.len());
        if depth >= self.max_depth || parent == 0.0 || idx.len() < 2 * self.min_leaf {
            return id;
        }
        let Some((impurity, feature, threshold)) = self.best_split(idx) else {
            return id;
        };
        if impurity >= parent - 1e-12 {
            return id;
        }
        let (l, r): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.build(&l, depth + 1);
        let right = self.build(&r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl TreeParams {
    pub(crate) fn fit(x: &[Vec<f64>], y: &[TaskLabel], max_depth: usize, min_leaf: usize) -> Self {
        let mut b = Builder {
            x,
            y,
            max_depth,
            min_leaf,
            nodes: Vec::new(),
        };
        let idx: Vec<usize> = (0..x.len()).collect();
        b.build(&idx, 0);
        Self { nodes: b.nodes }
    }

    pub fn predict(&self, z: &[f64]) -> TaskLabel {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if z[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Number of splits on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    /// Children point forward, features are in range.
    pub(crate) fn is_well_formed(&self, dim: usize) -> bool {
        !self.nodes.is_empty()
            && self.nodes.iter().enumerate().all(|(i, n)| match n {
                Node::Leaf { .. } => true,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    *feature < dim
                        && threshold.is_finite()
                        && *left > i
                        && *right > i
                        && *left < self.nodes.len()
                        && *right < self.nodes.len()
                }
            })
    }
}
