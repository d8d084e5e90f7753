//! Random forest of entropy-criterion decision trees.
//!
//! Each tree trains on a seeded bootstrap sample and considers
//! `floor(sqrt(V))` seeded-sampled candidate features per node, splitting on
//! maximum information gain with thresholds at midpoints between consecutive
//! distinct observed values. Trees are unpruned; growth stops when a node is
//! pure or smaller than `min_samples_split`. Per-tree seeds derive as
//! `seed + tree_index`, so tree-level parallelism does not disturb
//! reproducibility.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmax_lowest, Prediction};
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::rng::SplitMix64;

/// Split criterion. Only entropy (information gain) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Entropy,
}

/// Per-node feature subsampling rule. Only sqrt(V) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeaturesRule {
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfConfig {
    pub n_estimators: usize,
    pub criterion: Criterion,
    pub seed: u64,
    pub max_features_rule: MaxFeaturesRule,
    pub min_samples_split: usize,
}

impl Default for RfConfig {
    fn default() -> Self {
        RfConfig {
            n_estimators: 400,
            criterion: Criterion::Entropy,
            seed: 42,
            max_features_rule: MaxFeaturesRule::Sqrt,
            min_samples_split: 2,
        }
    }
}

impl RfConfig {
    fn validate(&self) -> Result<()> {
        if self.n_estimators < 1 {
            return Err(Error::Config("n_estimators must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be >= 2".into()));
        }
        Ok(())
    }
}

/// A decision tree node: internal nodes route `value <= threshold` left,
/// leaves hold the class histogram of their training samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node")]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        histogram: Vec<u64>,
    },
}

impl TreeNode {
    fn leaf_for(&self, x: &SparseVector) -> &[u64] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { histogram } => return histogram,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if (x.get(*feature) as f64) <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RfModel {
    pub trees: Vec<TreeNode>,
    pub config: RfConfig,
    pub n_classes: usize,
    pub n_features: usize,
}

impl RfModel {
    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dims() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                got: x.dims(),
            });
        }
        let mut probabilities = vec![0.0f64; self.n_classes];
        for tree in &self.trees {
            let hist = tree.leaf_for(x);
            let total: u64 = hist.iter().sum();
            for (p, &h) in probabilities.iter_mut().zip(hist) {
                *p += h as f64 / total as f64;
            }
        }
        let n_trees = self.trees.len() as f64;
        for p in &mut probabilities {
            *p /= n_trees;
        }
        let class = argmax_lowest(&probabilities);
        Ok(Prediction {
            class,
            probabilities,
        })
    }
}

/// Trains the forest. Deterministic given `config.seed`; trees may build in
/// parallel because each derives its own RNG from `seed + tree_index`.
pub fn train_rf(
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
    config: RfConfig,
) -> Result<RfModel> {
    config.validate()?;
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Training(format!(
            "need equal non-zero sample counts, got {} features / {} labels",
            x.len(),
            y.len()
        )));
    }
    if n_classes < 2 {
        return Err(Error::Config("need at least 2 classes".into()));
    }
    let n_features = x[0].dims();
    if n_features == 0 {
        return Err(Error::Training("zero-dimensional feature space".into()));
    }
    if let Some(bad) = x.iter().find(|v| v.dims() != n_features) {
        return Err(Error::Shape {
            expected: n_features,
            got: bad.dims(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::Training(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }

    let builder = TreeBuilder {
        x,
        y,
        n_classes,
        n_features,
        k_features: (n_features as f64).sqrt().floor().max(1.0) as usize,
        min_samples_split: config.min_samples_split,
    };
    let trees: Vec<TreeNode> = (0..config.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut rng = SplitMix64::new(config.seed.wrapping_add(t as u64));
            builder.build_tree(&mut rng)
        })
        .collect();

    Ok(RfModel {
        trees,
        config,
        n_classes,
        n_features,
    })
}

struct TreeBuilder<'a> {
    x: &'a [SparseVector],
    y: &'a [usize],
    n_classes: usize,
    n_features: usize,
    k_features: usize,
    min_samples_split: usize,
}

impl TreeBuilder<'_> {
    fn build_tree(&self, rng: &mut SplitMix64) -> TreeNode {
        let n = self.x.len();
        let bootstrap: Vec<usize> = (0..n).map(|_| rng.next_below(n)).collect();
        self.grow(bootstrap, rng)
    }

    fn histogram(&self, indices: &[usize]) -> Vec<u64> {
        let mut hist = vec![0u64; self.n_classes];
        for &i in indices {
            hist[self.y[i]] += 1;
        }
        hist
    }

    fn grow(&self, indices: Vec<usize>, rng: &mut SplitMix64) -> TreeNode {
        let hist = self.histogram(&indices);
        let pure = hist.iter().filter(|&&h| h > 0).count() <= 1;
        if pure || indices.len() < self.min_samples_split {
            return TreeNode::Leaf { histogram: hist };
        }

        let parent_entropy = entropy(&hist, indices.len() as f64);
        let candidates = rng.sample_indices(self.n_features, self.k_features);

        let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
        for feature in candidates {
            if let Some((gain, threshold)) =
                self.best_split_for_feature(&indices, feature, parent_entropy)
            {
                let better = match best {
                    None => gain > 0.0,
                    Some((best_gain, _, _)) => gain > best_gain,
                };
                if better {
                    best = Some((gain, feature, threshold));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            return TreeNode::Leaf { histogram: hist };
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .into_iter()
            .partition(|&i| (self.x[i].get(feature) as f64) <= threshold);
        TreeNode::Internal {
            feature,
            threshold,
            left: Box::new(self.grow(left_idx, rng)),
            right: Box::new(self.grow(right_idx, rng)),
        }
    }

    /// Best information gain over midpoint thresholds of one feature, or
    /// `None` when the feature is constant on this node.
    fn best_split_for_feature(
        &self,
        indices: &[usize],
        feature: usize,
        parent_entropy: f64,
    ) -> Option<(f64, f64)> {
        let mut pairs: Vec<(u32, usize)> = indices
            .iter()
            .map(|&i| (self.x[i].get(feature), self.y[i]))
            .collect();
        pairs.sort_by_key(|&(v, _)| v);
        if pairs.first()?.0 == pairs.last()?.0 {
            return None;
        }

        let total = pairs.len() as f64;
        let mut left_hist = vec![0u64; self.n_classes];
        let mut right_hist = self.histogram(indices);
        let mut best: Option<(f64, f64)> = None;

        let mut i = 0;
        while i < pairs.len() {
            let value = pairs[i].0;
            // move the whole block of equal values to the left side
            while i < pairs.len() && pairs[i].0 == value {
                left_hist[pairs[i].1] += 1;
                right_hist[pairs[i].1] -= 1;
                i += 1;
            }
            if i == pairs.len() {
                break;
            }
            let n_left = i as f64;
            let n_right = total - n_left;
            let children = (n_left / total) * entropy(&left_hist, n_left)
                + (n_right / total) * entropy(&right_hist, n_right);
            let gain = parent_entropy - children;
            let threshold = (value as f64 + pairs[i].0 as f64) / 2.0;
            // strict comparison: earliest threshold wins ties
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, threshold));
            }
        }
        best
    }
}

fn entropy(hist: &[u64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &count in hist {
        if count > 0 {
            let p = count as f64 / total;
            h -= p * p.ln();
        }
    }
    h
}
