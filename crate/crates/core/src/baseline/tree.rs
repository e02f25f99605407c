//! Least-squares regression trees with exact greedy splits.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes stored in an arena, root at index 0. Rows with
/// `row[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Reduction of the squared error.
    pub gain: f64,
}

pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl RegressionTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Fits `targets` on the rows listed in `index`, adding each split's gain
    /// to `importances[feature]`.
    pub(crate) fn fit(
        rows: &[Vec<f64>],
        targets: &[f64],
        index: &[usize],
        params: &TreeParams,
        importances: &mut [f64],
    ) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        tree.grow(rows, targets, index.to_vec(), 0, params, importances);
        tree
    }

    fn grow(
        &mut self,
        rows: &[Vec<f64>],
        targets: &[f64],
        index: Vec<usize>,
        depth: usize,
        params: &TreeParams,
        importances: &mut [f64],
    ) -> usize {
        let at = self.nodes.len();
        let mean = index.iter().map(|&i| targets[i]).sum::<f64>() / index.len() as f64;
        self.nodes.push(TreeNode::Leaf { value: mean });
        if depth >= params.max_depth {
            return at;
        }
        let Some(split) = best_split(rows, targets, &index, params.min_samples_leaf) else {
            return at;
        };
        importances[split.feature] += split.gain;
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = index
            .iter()
            .partition(|&&i| rows[i][split.feature] <= split.threshold);
        let left = self.grow(rows, targets, left_idx, depth + 1, params, importances);
        let right = self.grow(rows, targets, right_idx, depth + 1, params, importances);
        self.nodes[at] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }
}

/// Best variance-reduction split over all features and midpoints between
/// consecutive distinct values. Ties keep the lowest feature, then the
/// lowest threshold. `None` when no split has positive gain.
pub fn best_split(
    rows: &[Vec<f64>],
    targets: &[f64],
    index: &[usize],
    min_samples_leaf: usize,
) -> Option<SplitCandidate> {
    let n = index.len();
    if n < 2 * min_samples_leaf.max(1) {
        return None;
    }
    let width = rows[index[0]].len();
    let total: f64 = index.iter().map(|&i| targets[i]).sum();
    let parent_score = total * total / n as f64;
    let tolerance = 1e-12 * index.iter().map(|&i| targets[i] * targets[i]).sum::<f64>().max(1e-300);
    let mut best: Option<SplitCandidate> = None;
    let mut order = index.to_vec();
    for feature in 0..width {
        order.sort_by(|&a, &b| rows[a][feature].total_cmp(&rows[b][feature]));
        let mut left_sum = 0.0;
        for k in 0..n - 1 {
            left_sum += targets[order[k]];
            let left_n = k + 1;
            let right_n = n - left_n;
            if left_n < min_samples_leaf || right_n < min_samples_leaf {
                continue;
            }
            let (lo, hi) = (rows[order[k]][feature], rows[order[k + 1]][feature]);
            if lo == hi {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / left_n as f64 + right_sum * right_sum / right_n as f64
                - parent_score;
            if gain > tolerance && best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitCandidate {
                    feature,
                    threshold: 0.5 * (lo + hi),
                    gain,
                });
            }
        }
    }
    best
}
