//! CART-style decision tree over match features.
//!
//! Greedy Gini splits with deterministic tie-breaking (lowest feature index,
//! then lowest threshold), bounded depth, and a minimum leaf size. Masked
//! features route to the majority child — the side that received more
//! feature-present training rows — both during training and at inference.
//! Impurity is computed from integer class counts, so the trained tree is
//! identical for any permutation of the training pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{MatchFeatures, FEATURE_COUNT};

const TREE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 4,
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// positive-class fraction of the training rows in this leaf
        value: f64,
        n: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// where masked rows go
        majority_left: bool,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDecisionTree {
    version: u32,
    root: Node,
    pub config: TreeConfig,
    /// set when training data contained a single class
    pub single_class: bool,
}

impl PairDecisionTree {
    pub fn score(&self, features: &MatchFeatures) -> f64 {
        let values = features.as_array();
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    majority_left,
                    left,
                    right,
                } => {
                    let go_left = match values[*feature] {
                        Some(v) => v <= *threshold,
                        None => *majority_left,
                    };
                    node = if go_left { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<PairDecisionTree> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let tree: PairDecisionTree = serde_json::from_str(&body)?;
        if tree.version != TREE_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "matcher tree format version {} unsupported",
                tree.version
            )));
        }
        Ok(tree)
    }
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    majority_left: bool,
    gain: f64,
    left_rows: Vec<usize>,
    right_rows: Vec<usize>,
}

fn gini_from_counts(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Best split at a node, or None when nothing satisfies the constraints.
fn best_split(
    rows: &[usize],
    features: &[[Option<f64>; FEATURE_COUNT]],
    labels: &[bool],
    min_leaf: usize,
) -> Option<SplitChoice> {
    let n = rows.len();
    let pos_total = rows.iter().filter(|&&r| labels[r]).count();
    let parent_gini = gini_from_counts(pos_total, n);
    let mut best: Option<SplitChoice> = None;

    for feature in 0..FEATURE_COUNT {
        // (value, label) for present rows, plus masked totals
        let mut present: Vec<(f64, usize)> = Vec::new(); // (value, row)
        let mut masked: Vec<usize> = Vec::new();
        for &row in rows {
            match features[row][feature] {
                Some(v) => present.push((v, row)),
                None => masked.push(row),
            }
        }
        if present.len() < 2 {
            continue;
        }
        present.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| labels[a.1].cmp(&labels[b.1]))
        });
        let masked_pos = masked.iter().filter(|&&r| labels[r]).count();

        // Sweep thresholds at midpoints between distinct consecutive values.
        let mut left_present = 0usize;
        let mut left_present_pos = 0usize;
        let total_present = present.len();
        let total_present_pos = present.iter().filter(|(_, r)| labels[*r]).count();
        let mut i = 0;
        while i < total_present {
            // advance over equal values
            let value = present[i].0;
            while i < total_present && present[i].0 == value {
                left_present += 1;
                left_present_pos += usize::from(labels[present[i].1]);
                i += 1;
            }
            if i == total_present {
                break; // no split puts everything left
            }
            let threshold = (value + present[i].0) / 2.0;
            let right_present = total_present - left_present;
            // Masked rows follow the side with more present rows; ties left.
            let majority_left = left_present >= right_present;
            let (ln, lpos, rn, rpos) = if majority_left {
                (
                    left_present + masked.len(),
                    left_present_pos + masked_pos,
                    right_present,
                    total_present_pos - left_present_pos,
                )
            } else {
                (
                    left_present,
                    left_present_pos,
                    right_present + masked.len(),
                    total_present_pos - left_present_pos + masked_pos,
                )
            };
            if ln < min_leaf || rn < min_leaf {
                continue;
            }
            let weighted = (ln as f64 * gini_from_counts(lpos, ln)
                + rn as f64 * gini_from_counts(rpos, rn))
                / n as f64;
            let gain = parent_gini - weighted;
            let better = match &best {
                None => gain > 1e-12,
                Some(b) => gain > b.gain + 1e-12,
            };
            if better {
                let mut left_rows = Vec::with_capacity(ln);
                let mut right_rows = Vec::with_capacity(rn);
                for &row in rows {
                    match features[row][feature] {
                        Some(v) if v <= threshold => left_rows.push(row),
                        Some(_) => right_rows.push(row),
                        None => {
                            if majority_left {
                                left_rows.push(row)
                            } else {
                                right_rows.push(row)
                            }
                        }
                    }
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    majority_left,
                    gain,
                    left_rows,
                    right_rows,
                });
            }
        }
    }
    best
}

fn grow(
    rows: Vec<usize>,
    features: &[[Option<f64>; FEATURE_COUNT]],
    labels: &[bool],
    depth_left: usize,
    min_leaf: usize,
) -> Node {
    let n = rows.len();
    let pos = rows.iter().filter(|&&r| labels[r]).count();
    let leaf = Node::Leaf {
        value: if n == 0 { 0.0 } else { pos as f64 / n as f64 },
        n,
    };
    if depth_left == 0 || pos == 0 || pos == n {
        return leaf;
    }
    match best_split(&rows, features, labels, min_leaf) {
        None => leaf,
        Some(split) => Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            majority_left: split.majority_left,
            left: Box::new(grow(
                split.left_rows,
                features,
                labels,
                depth_left - 1,
                min_leaf,
            )),
            right: Box::new(grow(
                split.right_rows,
                features,
                labels,
                depth_left - 1,
                min_leaf,
            )),
        },
    }
}

/// Train the pair matcher. Requires at least two examples; a single-class
/// input produces a constant stump flagged via `single_class`.
pub fn train_matcher(
    pairs: &[(MatchFeatures, bool)],
    config: TreeConfig,
) -> Result<PairDecisionTree> {
    if pairs.len() < 2 {
        return Err(Error::Contract(format!(
            "matcher training needs at least 2 labeled pairs, got {}",
            pairs.len()
        )));
    }
    let features: Vec<[Option<f64>; FEATURE_COUNT]> =
        pairs.iter().map(|(f, _)| f.as_array()).collect();
    let labels: Vec<bool> = pairs.iter().map(|(_, l)| *l).collect();
    let pos = labels.iter().filter(|l| **l).count();
    let single_class = pos == 0 || pos == labels.len();
    let root = if single_class {
        Node::Leaf {
            value: if pos == 0 { 0.0 } else { 1.0 },
            n: labels.len(),
        }
    } else {
        grow(
            (0..pairs.len()).collect(),
            &features,
            &labels,
            config.max_depth,
            config.min_leaf,
        )
    };
    Ok(PairDecisionTree {
        version: TREE_FORMAT_VERSION,
        root,
        config,
        single_class,
    })
}

/// Precision/recall/F1 of the positive class at a 0.5 score threshold.
pub fn classification_f1(
    tree: &PairDecisionTree,
    pairs: &[(MatchFeatures, bool)],
) -> (f64, f64, f64) {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (features, label) in pairs {
        let predicted = tree.score(features) > 0.5;
        match (predicted, *label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feat(name: f64, employer: f64) -> MatchFeatures {
        MatchFeatures {
            name_score: Some(name),
            employer_cos: Some(employer),
            ..MatchFeatures::default()
        }
    }

    fn separable_set() -> Vec<(MatchFeatures, bool)> {
        // name_score > 0.5 <=> positive
        let mut pairs = Vec::new();
        for i in 0..12 {
            let v = 0.6 + 0.03 * i as f64;
            pairs.push((feat(v, 0.5), true));
            let w = 0.1 + 0.03 * i as f64;
            pairs.push((feat(w, 0.5), false));
        }
        pairs
    }

    #[test]
    fn separable_set_trains_to_perfect_accuracy() {
        let pairs = separable_set();
        let tree = train_matcher(&pairs, TreeConfig::default()).unwrap();
        for (f, label) in &pairs {
            assert_eq!(tree.score(f) > 0.5, *label);
        }
        let (_, _, f1) = classification_f1(&tree, &pairs);
        assert_eq!(f1, 1.0);
    }

    #[test]
    fn single_class_input_is_a_flagged_stump() {
        let pairs: Vec<(MatchFeatures, bool)> = (0..6).map(|i| (feat(0.1 * i as f64, 0.0), true)).collect();
        let tree = train_matcher(&pairs, TreeConfig::default()).unwrap();
        assert!(tree.single_class);
        assert_eq!(tree.score(&feat(0.0, 0.0)), 1.0);
    }

    #[test]
    fn too_few_examples_rejected() {
        assert!(train_matcher(&[(feat(1.0, 1.0), true)], TreeConfig::default()).is_err());
    }

    #[test]
    fn depth_respects_configuration() {
        let pairs = separable_set();
        let tree = train_matcher(
            &pairs,
            TreeConfig {
                max_depth: 1,
                min_leaf: 1,
            },
        )
        .unwrap();
        assert!(tree.depth() <= 1);
    }

    /// Brute-force depth-1 oracle: enumerate every feature and midpoint
    /// threshold, compute the weighted Gini by direct counting, and return
    /// the winner under the same (lowest feature, lowest threshold)
    /// tie-break.
    fn brute_force_depth1(
        pairs: &[(MatchFeatures, bool)],
        min_leaf: usize,
    ) -> Option<(usize, f64, f64)> {
        let n = pairs.len();
        let pos = pairs.iter().filter(|(_, l)| *l).count();
        let parent = gini_from_counts(pos, n);
        let mut best: Option<(usize, f64, f64)> = None;
        for feature in 0..FEATURE_COUNT {
            let mut values: Vec<f64> = pairs
                .iter()
                .filter_map(|(f, _)| f.as_array()[feature])
                .collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            for w in values.windows(2) {
                let threshold = (w[0] + w[1]) / 2.0;
                let present_left = pairs
                    .iter()
                    .filter(|(f, _)| matches!(f.as_array()[feature], Some(v) if v <= threshold))
                    .count();
                let present_right = pairs
                    .iter()
                    .filter(|(f, _)| matches!(f.as_array()[feature], Some(v) if v > threshold))
                    .count();
                let majority_left = present_left >= present_right;
                let goes_left = |f: &MatchFeatures| match f.as_array()[feature] {
                    Some(v) => v <= threshold,
                    None => majority_left,
                };
                let ln = pairs.iter().filter(|(f, _)| goes_left(f)).count();
                let lpos = pairs.iter().filter(|(f, l)| goes_left(f) && *l).count();
                let rn = n - ln;
                let rpos = pos - lpos;
                if ln < min_leaf || rn < min_leaf {
                    continue;
                }
                let weighted = (ln as f64 * gini_from_counts(lpos, ln)
                    + rn as f64 * gini_from_counts(rpos, rn))
                    / n as f64;
                let gain = parent - weighted;
                let better = match best {
                    None => gain > 1e-12,
                    Some((_, _, bg)) => gain > bg + 1e-12,
                };
                if better {
                    best = Some((feature, threshold, gain));
                }
            }
        }
        best
    }

    #[test]
    fn depth1_split_matches_brute_force_on_random_sets() {
        let mut rng = crate::rng::Rng::new(77);
        for trial in 0..50 {
            let n = 4 + rng.below(27) as usize; // up to 30 pairs
            let pairs: Vec<(MatchFeatures, bool)> = (0..n)
                .map(|_| {
                    let mut f = MatchFeatures::default();
                    // a few features, some masked
                    if rng.chance(0.8) {
                        f.name_score = Some((rng.below(5) as f64) / 4.0);
                    }
                    if rng.chance(0.8) {
                        f.employer_cos = Some((rng.below(4) as f64) / 3.0);
                    }
                    if rng.chance(0.5) {
                        f.zip_exact = Some(rng.below(2) as f64);
                    }
                    (f, rng.chance(0.5))
                })
                .collect();
            let labels_present: std::collections::BTreeSet<bool> =
                pairs.iter().map(|(_, l)| *l).collect();
            if labels_present.len() < 2 {
                continue;
            }
            let config = TreeConfig {
                max_depth: 1,
                min_leaf: 1,
            };
            let tree = train_matcher(&pairs, config).unwrap();
            let oracle = brute_force_depth1(&pairs, 1);
            match (&tree.root, oracle) {
                (Node::Leaf { .. }, None) => {}
                (
                    Node::Split {
                        feature, threshold, ..
                    },
                    Some((of, ot, _)),
                ) => {
                    assert_eq!(*feature, of, "trial {trial}");
                    assert!((threshold - ot).abs() < 1e-12, "trial {trial}");
                }
                (node, oracle) => panic!("trial {trial}: tree {node:?} vs oracle {oracle:?}"),
            }
        }
    }

    #[test]
    fn training_is_permutation_invariant() {
        let mut pairs = separable_set();
        // add masked rows and a second informative feature
        for i in 0..8 {
            let mut f = MatchFeatures::default();
            f.employer_cos = Some(0.9);
            f.zip_exact = Some(f64::from(i % 2 == 0));
            pairs.push((f, i % 2 == 0));
        }
        let tree_a = train_matcher(&pairs, TreeConfig::default()).unwrap();
        // deterministic permutation
        let mut rng = crate::rng::Rng::new(123);
        let mut permuted = pairs.clone();
        rng.shuffle(&mut permuted);
        let tree_b = train_matcher(&permuted, TreeConfig::default()).unwrap();
        assert_eq!(tree_a, tree_b);
    }

    #[test]
    fn tree_round_trips_through_json() {
        let pairs = separable_set();
        let tree = train_matcher(&pairs, TreeConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tree.json");
        tree.save_json(&path).unwrap();
        let loaded = PairDecisionTree::load_json(&path).unwrap();
        assert_eq!(tree, loaded);
    }
}
