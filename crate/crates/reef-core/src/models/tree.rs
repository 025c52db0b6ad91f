//! CART-style regression trees and random forests.
//!
//! Regression splits maximize SSE reduction (the regression analog of
//! information gain), scanning midpoints between consecutive distinct sorted
//! feature values; the classical entropy formula is provided as a standalone
//! utility. Forests train one tree per seeded bootstrap sample with a fresh
//! random feature subset at every split.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::ReefDataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Rng};

/// Shannon entropy in bits over class proportions; 0·log0 counts as 0.
pub fn entropy(proportions: &[f64]) -> Result<f64> {
    for &p in proportions {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidConfig(format!(
                "proportion out of [0,1]: {p}"
            )));
        }
    }
    let sum: f64 = proportions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProportions { sum });
    }
    Ok(proportions
        .iter()
        .map(|&p| if p == 0.0 { 0.0 } else { -p * p.log2() })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    /// Number of split levels allowed; None means unlimited.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig(
                "min_samples_split must be >= 2".into(),
            ));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidConfig("min_samples_leaf must be >= 1".into()));
        }
        Ok(())
    }
}

/// Tree structure as persisted: internal nodes carry a feature/threshold
/// pair, leaves carry the mean training target that reached them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        leaf_value: f64,
    },
}

impl TreeNode {
    /// Routes a row to its leaf; values ≤ threshold go left.
    fn route(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { leaf_value } => *leaf_value,
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.route(row)
                } else {
                    right.route(row)
                }
            }
        }
    }

    fn collect_features(&self, out: &mut BTreeSet<usize>) {
        if let TreeNode::Internal {
            feature,
            left,
            right,
            ..
        } = self
        {
            out.insert(*feature);
            left.collect_features(out);
            right.collect_features(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_features: usize,
    pub root: TreeNode,
}

impl TreeModel {
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                context: "tree input width",
                left: self.n_features.to_string(),
                right: row.len().to_string(),
            });
        }
        Ok(self.root.route(row))
    }
}

/// The winning split of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub sse_reduction: f64,
}

/// Best split over all features; see [`best_split_among`].
pub fn best_split(data: &ReefDataset, rows: &[usize], cfg: &TreeConfig) -> Option<Split> {
    let all: Vec<usize> = (0..data.n_features()).collect();
    best_split_among(data, rows, &all, cfg)
}

/// Scans the given candidate features (ascending) and every midpoint between
/// consecutive distinct sorted values, honoring min_samples_leaf. Ties break
/// toward the lowest feature index, then the lowest threshold; improvements
/// at or below roundoff scale (1e-12) count as no improvement. Returns None
/// when the targets are constant or nothing qualifies.
pub fn best_split_among(
    data: &ReefDataset,
    rows: &[usize],
    features: &[usize],
    cfg: &TreeConfig,
) -> Option<Split> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let first_y = data.targets()[rows[0]];
    if rows.iter().all(|&i| data.targets()[i] == first_y) {
        return None;
    }

    let mut total_y = 0.0;
    let mut total_y2 = 0.0;
    for &i in rows {
        let y = data.targets()[i];
        total_y += y;
        total_y2 += y * y;
    }
    let sse_parent = total_y2 - total_y * total_y / n as f64;

    let mut best: Option<Split> = None;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &feature in features {
        pairs.clear();
        pairs.extend(rows.iter().map(|&i| (data.row(i)[feature], data.targets()[i])));
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_y = 0.0;
        let mut left_y2 = 0.0;
        for k in 1..n {
            let (x_prev, y_prev) = pairs[k - 1];
            left_y += y_prev;
            left_y2 += y_prev * y_prev;
            if x_prev == pairs[k].0 {
                continue;
            }
            if k < cfg.min_samples_leaf || n - k < cfg.min_samples_leaf {
                continue;
            }
            let right_y = total_y - left_y;
            let right_y2 = total_y2 - left_y2;
            let sse_left = left_y2 - left_y * left_y / k as f64;
            let sse_right = right_y2 - right_y * right_y / (n - k) as f64;
            let reduction = sse_parent - sse_left - sse_right;
            if reduction <= 1e-12 {
                continue;
            }
            if best.is_none_or(|b| reduction > b.sse_reduction) {
                best = Some(Split {
                    feature,
                    threshold: (x_prev + pairs[k].0) / 2.0,
                    sse_reduction: reduction,
                });
            }
        }
    }
    best
}

fn leaf(data: &ReefDataset, rows: &[usize]) -> TreeNode {
    let sum: f64 = rows.iter().map(|&i| data.targets()[i]).sum();
    TreeNode::Leaf {
        leaf_value: sum / rows.len() as f64,
    }
}

/// Recursive builder. `pick_features` is consulted once per split attempt,
/// pre-order (node, then left subtree, then right), which fixes the RNG
/// consumption order for forests.
fn build_node(
    data: &ReefDataset,
    rows: Vec<usize>,
    cfg: &TreeConfig,
    depth: usize,
    pick_features: &mut dyn FnMut() -> Vec<usize>,
) -> TreeNode {
    if let Some(limit) = cfg.max_depth {
        if depth >= limit {
            return leaf(data, &rows);
        }
    }
    if rows.len() < cfg.min_samples_split {
        return leaf(data, &rows);
    }
    let candidates = pick_features();
    let split = match best_split_among(data, &rows, &candidates, cfg) {
        Some(s) => s,
        None => return leaf(data, &rows),
    };
    let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
    for &i in &rows {
        if data.row(i)[split.feature] <= split.threshold {
            left_rows.push(i);
        } else {
            right_rows.push(i);
        }
    }
    TreeNode::Internal {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build_node(data, left_rows, cfg, depth + 1, pick_features)),
        right: Box::new(build_node(data, right_rows, cfg, depth + 1, pick_features)),
    }
}

pub fn fit_tree(train: &ReefDataset, cfg: &TreeConfig) -> Result<TreeModel> {
    cfg.validate()?;
    if train.n_rows() == 0 {
        return Err(Error::NoRows {
            context: "tree fit",
        });
    }
    let rows: Vec<usize> = (0..train.n_rows()).collect();
    let all: Vec<usize> = (0..train.n_features()).collect();
    let mut pick = || all.clone();
    let root = build_node(train, rows, cfg, 0, &mut pick);
    Ok(TreeModel {
        n_features: train.n_features(),
        root,
    })
}

fn default_n_trees() -> usize {
    100
}
fn default_bootstrap() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    #[serde(default = "default_n_trees")]
    pub n_trees: usize,
    /// Features considered per split; None means ceil(p / 3).
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: bool,
    /// Root seed for this forest; per-tree seeds derive from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tree: TreeConfig,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: default_n_trees(),
            max_features: None,
            bootstrap: default_bootstrap(),
            seed: 0,
            tree: TreeConfig::default(),
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::InvalidConfig("n_trees must be >= 1".into()));
        }
        if self.max_features == Some(0) {
            return Err(Error::InvalidConfig("max_features must be >= 1".into()));
        }
        self.tree.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub n_features: usize,
    pub n_trees: usize,
    /// Features considered per split, after resolving the ceil(p/3) default.
    pub max_features: usize,
    pub bootstrap: bool,
    pub seed: u64,
    pub trees: Vec<TreeNode>,
    /// Sorted feature indices actually split on, per tree.
    pub features_used: Vec<Vec<usize>>,
}

impl ForestModel {
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                context: "forest input width",
                left: self.n_features.to_string(),
                right: row.len().to_string(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.route(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }
}

/// Draws `count` distinct feature indices, returned ascending.
fn sample_features(rng: &mut Rng, p: usize, count: usize) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..p).collect();
    for i in 0..count {
        let j = i + rng.below(p - i);
        indices.swap(i, j);
    }
    indices.truncate(count);
    indices.sort_unstable();
    indices
}

pub fn fit_forest(train: &ReefDataset, cfg: &ForestConfig) -> Result<ForestModel> {
    cfg.validate()?;
    let n = train.n_rows();
    if n == 0 {
        return Err(Error::NoRows {
            context: "forest fit",
        });
    }
    let p = train.n_features();
    let max_features = cfg.max_features.unwrap_or(p.div_ceil(3));
    if max_features > p {
        return Err(Error::InvalidConfig(format!(
            "max_features {max_features} exceeds feature count {p}"
        )));
    }

    let mut trees = Vec::with_capacity(cfg.n_trees);
    let mut features_used = Vec::with_capacity(cfg.n_trees);
    for tree_index in 0..cfg.n_trees {
        let mut rng = Rng::new(derive_seed(cfg.seed, &format!("tree/{tree_index}")));
        let rows: Vec<usize> = if cfg.bootstrap {
            (0..n).map(|_| rng.below(n)).collect()
        } else {
            (0..n).collect()
        };
        let mut pick = || sample_features(&mut rng, p, max_features);
        let root = build_node(train, rows, &cfg.tree, 0, &mut pick);
        let mut used = BTreeSet::new();
        root.collect_features(&mut used);
        features_used.push(used.into_iter().collect());
        trees.push(root);
    }
    Ok(ForestModel {
        n_features: p,
        n_trees: cfg.n_trees,
        max_features,
        bootstrap: cfg.bootstrap,
        seed: cfg.seed,
        trees,
        features_used,
    })
}
