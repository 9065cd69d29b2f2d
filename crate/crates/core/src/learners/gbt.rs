//! Gradient boosted regression trees, squared loss, from scratch.
//!
//! Boosting starts from the target mean and adds depth-bounded regression
//! trees fit to the residuals, scaled by the learning rate. Splits are exact
//! greedy variance-reduction splits over every feature and every midpoint
//! between distinct values, with deterministic tie-breaking on lowest
//! feature index then lowest threshold. Leaf values are mean residuals, so
//! training MSE is non-increasing for any learning rate in (0, 1].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    pub rounds: usize,
    pub depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig {
            rounds: 300,
            depth: 5,
            learning_rate: 0.01,
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
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

/// One regression tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn is_stump(&self) -> bool {
        self.nodes.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtEnsemble {
    pub initial: f64,
    pub learning_rate: f64,
    pub n_features: usize,
    trees: Vec<RegressionTree>,
    /// training MSE after each round (unclamped predictions)
    pub training_mse: Vec<f64>,
}

impl GbtEnsemble {
    pub fn rounds_used(&self) -> usize {
        self.trees.len()
    }

    /// Raw ensemble output: initial + lr * sum of tree outputs.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::Contract(format!(
                "gbt expects {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        let mut out = self.initial;
        for tree in &self.trees {
            out += self.learning_rate * tree.predict(x);
        }
        Ok(out)
    }

    /// Prediction clamped at zero: incomes are non-negative.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict_raw(x)?.max(0.0))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<GbtEnsemble> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&body)?)
    }
}

/// Per-level sweep state for one active node while scanning one feature's
/// pre-sorted order.
#[derive(Clone, Copy)]
struct SweepState {
    left_sum: f64,
    left_n: usize,
    prev_value: f64,
    started: bool,
}

#[derive(Clone, Copy)]
struct NodeStats {
    n: usize,
    sum: f64,
    best_gain: f64,
    best_feature: usize,
    best_threshold: f64,
    has_split: bool,
}

/// Build one regression tree with exact greedy SSE-reduction splits, grown
/// level by level over columns pre-sorted once per training call.
fn fit_tree(
    columns: &[Vec<f64>],
    sorted_orders: &[Vec<u32>],
    residuals: &[f64],
    depth: usize,
    min_leaf: usize,
) -> RegressionTree {
    let n = residuals.len();
    let mut nodes: Vec<TreeNode> = vec![TreeNode::Leaf { value: 0.0 }];
    // slot in the current level's active list, or -1 once finalized
    let mut slot_of: Vec<i32> = vec![0; n];
    let mut active_nodes: Vec<usize> = vec![0]; // arena ids per slot

    for _level in 0..depth {
        if active_nodes.is_empty() {
            break;
        }
        let n_slots = active_nodes.len();
        // per-slot totals, accumulated in ascending row order
        let mut stats: Vec<NodeStats> = vec![
            NodeStats {
                n: 0,
                sum: 0.0,
                best_gain: 0.0,
                best_feature: 0,
                best_threshold: 0.0,
                has_split: false,
            };
            n_slots
        ];
        for row in 0..n {
            let slot = slot_of[row];
            if slot >= 0 {
                stats[slot as usize].n += 1;
                stats[slot as usize].sum += residuals[row];
            }
        }

        for (feature, order) in sorted_orders.iter().enumerate() {
            let mut sweep = vec![
                SweepState {
                    left_sum: 0.0,
                    left_n: 0,
                    prev_value: 0.0,
                    started: false,
                };
                n_slots
            ];
            for &row32 in order {
                let row = row32 as usize;
                let slot = slot_of[row];
                if slot < 0 {
                    continue;
                }
                let s = slot as usize;
                let value = columns[feature][row];
                let state = &mut sweep[s];
                if state.started && value > state.prev_value {
                    // candidate threshold between the previous distinct value
                    // and this one
                    let node = &mut stats[s];
                    let left_n = state.left_n;
                    let right_n = node.n - left_n;
                    if left_n >= min_leaf && right_n >= min_leaf {
                        let left_sum = state.left_sum;
                        let right_sum = node.sum - left_sum;
                        let parent_score = node.sum * node.sum / node.n as f64;
                        let gain = left_sum * left_sum / left_n as f64
                            + right_sum * right_sum / right_n as f64
                            - parent_score;
                        let better = if node.has_split {
                            gain > node.best_gain + 1e-12
                        } else {
                            gain > 1e-12
                        };
                        if better {
                            node.best_gain = gain;
                            node.best_feature = feature;
                            node.best_threshold = (state.prev_value + value) / 2.0;
                            node.has_split = true;
                        }
                    }
                }
                state.left_sum += residuals[row];
                state.left_n += 1;
                state.prev_value = value;
                state.started = true;
            }
        }

        // materialize splits and leaves; route rows to next-level slots
        let mut next_active: Vec<usize> = Vec::new();
        let mut child_slot_base: Vec<i32> = vec![-1; n_slots];
        for s in 0..n_slots {
            let node_id = active_nodes[s];
            let st = &stats[s];
            if st.has_split {
                let left_id = nodes.len();
                nodes.push(TreeNode::Leaf { value: 0.0 });
                let right_id = nodes.len();
                nodes.push(TreeNode::Leaf { value: 0.0 });
                nodes[node_id] = TreeNode::Split {
                    feature: st.best_feature,
                    threshold: st.best_threshold,
                    left: left_id,
                    right: right_id,
                };
                child_slot_base[s] = next_active.len() as i32;
                next_active.push(left_id);
                next_active.push(right_id);
            } else {
                nodes[node_id] = TreeNode::Leaf {
                    value: if st.n == 0 { 0.0 } else { st.sum / st.n as f64 },
                };
            }
        }
        for row in 0..n {
            let slot = slot_of[row];
            if slot < 0 {
                continue;
            }
            let s = slot as usize;
            if child_slot_base[s] < 0 {
                slot_of[row] = -1; // finalized leaf
            } else {
                let st = &stats[s];
                let go_left = columns[st.best_feature][row] <= st.best_threshold;
                slot_of[row] = child_slot_base[s] + i32::from(!go_left);
            }
        }
        active_nodes = next_active;
    }

    // depth exhausted: finalize remaining nodes as leaves
    if !active_nodes.is_empty() {
        let n_slots = active_nodes.len();
        let mut sums = vec![0.0f64; n_slots];
        let mut counts = vec![0usize; n_slots];
        for row in 0..n {
            let slot = slot_of[row];
            if slot >= 0 {
                sums[slot as usize] += residuals[row];
                counts[slot as usize] += 1;
            }
        }
        for (s, &node_id) in active_nodes.iter().enumerate() {
            nodes[node_id] = TreeNode::Leaf {
                value: if counts[s] == 0 {
                    0.0
                } else {
                    sums[s] / counts[s] as f64
                },
            };
        }
    }
    RegressionTree { nodes }
}

/// Train the boosted ensemble on squared loss.
pub fn gbt_train(xs: &[Vec<f64>], ys: &[f64], config: &GbtConfig) -> Result<GbtEnsemble> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Contract(format!(
            "gbt training needs matching non-empty inputs, got {} x {}",
            xs.len(),
            ys.len()
        )));
    }
    let n_features = xs[0].len();
    if xs.iter().any(|x| x.len() != n_features) {
        return Err(Error::Contract("inconsistent feature dimensions".into()));
    }
    if !(0.0 < config.learning_rate && config.learning_rate <= 1.0) {
        return Err(Error::Config(format!(
            "learning rate must be in (0,1], got {}",
            config.learning_rate
        )));
    }
    // feature-major copy for cache-friendly splitting
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(xs.len()); n_features];
    for x in xs {
        for (f, v) in x.iter().enumerate() {
            columns[f].push(*v);
        }
    }
    // columns never change across rounds: sort each once, ties by row index
    let sorted_orders: Vec<Vec<u32>> = columns
        .iter()
        .map(|column| {
            let mut order: Vec<u32> = (0..column.len() as u32).collect();
            order.sort_by(|&a, &b| {
                column[a as usize]
                    .partial_cmp(&column[b as usize])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.cmp(&b))
            });
            order
        })
        .collect();

    let n = ys.len();
    let initial = ys.iter().sum::<f64>() / n as f64;
    let mut predictions = vec![initial; n];
    let mut residuals = vec![0.0; n];
    let mut trees = Vec::with_capacity(config.rounds);
    let mut training_mse = Vec::with_capacity(config.rounds);

    for _ in 0..config.rounds {
        for i in 0..n {
            residuals[i] = ys[i] - predictions[i];
        }
        let tree = fit_tree(
            &columns,
            &sorted_orders,
            &residuals,
            config.depth,
            config.min_leaf,
        );
        // A stump whose value is ~zero adds nothing now or in any later
        // round (the residual mean stays put): stop early.
        if tree.is_stump() {
            if let TreeNode::Leaf { value } = tree.nodes[0] {
                if value.abs() < 1e-12 {
                    break;
                }
            }
        }
        for i in 0..n {
            predictions[i] += config.learning_rate * tree.predict(&xs[i]);
        }
        trees.push(tree);
        let mse = ys
            .iter()
            .zip(&predictions)
            .map(|(y, p)| (y - p) * (y - p))
            .sum::<f64>()
            / n as f64;
        training_mse.push(mse);
    }

    Ok(GbtEnsemble {
        initial,
        learning_rate: config.learning_rate,
        n_features,
        trees,
        training_mse,
    })
}
