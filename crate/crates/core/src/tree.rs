//! Single-tree construction and prediction.
//!
//! Trees are stored as a flat arena with the root at index 0. Children are
//! always allocated after their parent.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, IndexView, Targets};
use crate::error::{Error, Result};
use crate::split::{choose_split, sample_categorical, Criterion, SplitContext, SplitPoint, SplitStrategyConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum LeafPayload {
    Class {
        /// Fraction of the leaf's samples in each class.
        votes: Vec<f64>,
        label: usize,
        count: usize,
    },
    Value {
        mean: f64,
        count: usize,
    },
}

impl LeafPayload {
    pub fn count(&self) -> usize {
        match self {
            LeafPayload::Class { count, .. } | LeafPayload::Value { count, .. } => *count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        split: SplitPoint,
        left: usize,
        right: usize,
        /// Structure samples at the node when it was split.
        count: usize,
    },
    Leaf(LeafPayload),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafRule {
    /// Most frequent class, lowest code on ties.
    Majority,
    /// Class drawn once from the leaf's vote fractions.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeBuildConfig {
    pub strategy: SplitStrategyConfig,
    /// Nodes with fewer samples are not split.
    pub k_n: usize,
    /// Reject thresholds that leave a child with fewer than `k_n` samples.
    pub strict_leaf: bool,
    pub weighted_mse: bool,
    pub leaf_rule: LeafRule,
}

impl TreeBuildConfig {
    pub fn new(strategy: SplitStrategyConfig, k_n: usize) -> Self {
        TreeBuildConfig {
            strategy,
            k_n,
            strict_leaf: false,
            weighted_mse: false,
            leaf_rule: LeafRule::Majority,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_n == 0 {
            return Err(Error::param("kn", "must be at least 1"));
        }
        self.strategy.validate()
    }

    fn context(&self, data: &Dataset) -> SplitContext {
        let criterion = match data.targets() {
            Targets::Classes { n_classes, .. } => Criterion::Gini {
                n_classes: *n_classes,
            },
            Targets::Values(_) => Criterion::Mse {
                weighted: self.weighted_mse,
            },
        };
        SplitContext {
            criterion,
            min_child: if self.strict_leaf { self.k_n } else { 1 },
        }
    }
}

/// Rows a tree learns from.
#[derive(Debug, Clone, Copy)]
pub enum TrainingSet<'a> {
    /// Splits and leaf payloads use the same rows.
    Shared(&'a [usize]),
    /// Splits are chosen on `structure`; leaves are labelled by the
    /// `estimation` rows that reach them, or by their structure rows when
    /// none do.
    Separate {
        structure: &'a [usize],
        estimation: &'a [usize],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    n_features: usize,
    nodes: Vec<TreeNode>,
}

/// Vote fractions over `n_classes` and the majority class.
pub fn leaf_label_classification(codes: &[usize], n_classes: usize) -> Result<(Vec<f64>, usize)> {
    if codes.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let mut counts = vec![0usize; n_classes];
    for &c in codes {
        if c >= n_classes {
            return Err(Error::param("labels", format!("class code {c} >= {n_classes}")));
        }
        counts[c] += 1;
    }
    let label = argmax_lowest(&counts);
    let n = codes.len() as f64;
    Ok((counts.iter().map(|&c| c as f64 / n).collect(), label))
}

pub fn leaf_label_regression(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// A class drawn from the leaf's vote fractions.
pub fn mrf_se_leaf_label<R: Rng + ?Sized>(codes: &[usize], n_classes: usize, rng: &mut R) -> Result<usize> {
    let (votes, _) = leaf_label_classification(codes, n_classes)?;
    sample_categorical(&votes, rng)
}

fn argmax_lowest(counts: &[usize]) -> usize {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best
}

fn is_pure(data: &Dataset, rows: &[usize]) -> bool {
    match data.targets() {
        Targets::Classes { codes, .. } => rows.iter().all(|&i| codes[i] == codes[rows[0]]),
        Targets::Values(v) => rows.iter().all(|&i| v[i] == v[rows[0]]),
    }
}

fn leaf_payload<R: Rng + ?Sized>(data: &Dataset, rows: &[usize], rule: LeafRule, rng: &mut R) -> LeafPayload {
    match data.targets() {
        Targets::Classes { codes, n_classes } => {
            let leaf_codes: Vec<usize> = rows.iter().map(|&i| codes[i]).collect();
            let (votes, majority) =
                leaf_label_classification(&leaf_codes, *n_classes).expect("leaf rows are nonempty");
            let label = match rule {
                LeafRule::Majority => majority,
                LeafRule::Sampled => sample_categorical(&votes, rng).expect("vote fractions sum to 1"),
            };
            LeafPayload::Class {
                votes,
                label,
                count: rows.len(),
            }
        }
        Targets::Values(v) => LeafPayload::Value {
            mean: rows.iter().map(|&i| v[i]).sum::<f64>() / rows.len() as f64,
            count: rows.len(),
        },
    }
}

struct Pending {
    id: usize,
    structure: Vec<usize>,
    estimation: Option<Vec<usize>>,
}

pub fn build_tree<R: Rng + ?Sized>(
    data: &Dataset,
    training: TrainingSet<'_>,
    cfg: &TreeBuildConfig,
    rng: &mut R,
) -> Result<Tree> {
    cfg.validate()?;
    let (structure, estimation) = match training {
        TrainingSet::Shared(rows) => (rows, None),
        TrainingSet::Separate { structure, estimation } => (structure, Some(estimation)),
    };
    IndexView::new(data, structure)?;
    if let Some(e) = estimation {
        if let Some(&bad) = e.iter().find(|&&i| i >= data.n_rows()) {
            return Err(Error::param("indices", format!("row {bad} outside 0..{}", data.n_rows())));
        }
    }

    let ctx = cfg.context(data);
    let placeholder = || TreeNode::Leaf(LeafPayload::Value { mean: f64::NAN, count: 0 });
    let mut nodes = vec![placeholder()];
    let mut stack = vec![Pending {
        id: 0,
        structure: structure.to_vec(),
        estimation: estimation.map(<[usize]>::to_vec),
    }];

    while let Some(Pending { id, structure, estimation }) = stack.pop() {
        let view = IndexView::new_unchecked(data, &structure);
        let split = if structure.len() < cfg.k_n || is_pure(data, &structure) {
            None
        } else {
            choose_split(&view, &cfg.strategy, &ctx, rng)
        };
        let Some(split) = split else {
            let rows = match &estimation {
                Some(e) if !e.is_empty() => e,
                _ => &structure,
            };
            nodes[id] = TreeNode::Leaf(leaf_payload(data, rows, cfg.leaf_rule, rng));
            continue;
        };

        let (ls, rs): (Vec<usize>, Vec<usize>) =
            structure.iter().partition(|&&i| split.goes_left(data.row(i)));
        debug_assert!(!ls.is_empty() && !rs.is_empty());
        let (le, re) = match estimation {
            Some(e) => {
                let (l, r): (Vec<usize>, Vec<usize>) = e.iter().partition(|&&i| split.goes_left(data.row(i)));
                (Some(l), Some(r))
            }
            None => (None, None),
        };
        let left = nodes.len();
        let right = left + 1;
        nodes.push(placeholder());
        nodes.push(placeholder());
        nodes[id] = TreeNode::Split {
            split,
            left,
            right,
            count: structure.len(),
        };
        stack.push(Pending {
            id: right,
            structure: rs,
            estimation: re,
        });
        stack.push(Pending {
            id: left,
            structure: ls,
            estimation: le,
        });
    }
    Ok(Tree {
        n_features: data.n_features(),
        nodes,
    })
}

impl Tree {
    /// Assembles a tree from an arena, checking that child links point
    /// forward and stay in range and that split features exist.
    pub fn from_nodes(n_features: usize, nodes: Vec<TreeNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::param("tree", "no nodes"));
        }
        let mut parents = vec![0u32; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            if let TreeNode::Split { split, left, right, .. } = node {
                if split.feature >= n_features {
                    return Err(Error::param(
                        "tree",
                        format!("node {id} splits on feature {} of {n_features}", split.feature),
                    ));
                }
                for &child in [left, right] {
                    if child <= id || child >= nodes.len() {
                        return Err(Error::param("tree", format!("node {id} has bad child {child}")));
                    }
                    parents[child] += 1;
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err(Error::param("tree", "nodes do not form a single tree"));
        }
        Ok(Tree { n_features, nodes })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf(_))).count()
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let TreeNode::Split { left, right, .. } = node {
                depth[*left] = depth[id] + 1;
                depth[*right] = depth[id] + 1;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Leaf reached by `x`. `x` must have at least `n_features` values.
    pub fn leaf(&self, x: &[f64]) -> &LeafPayload {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                TreeNode::Split { split, left, right, .. } => {
                    id = if split.goes_left(x) { *left } else { *right };
                }
                TreeNode::Leaf(payload) => return payload,
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(match self.leaf(x) {
            LeafPayload::Class { label, .. } => Prediction::Class(*label),
            LeafPayload::Value { mean, .. } => Prediction::Value(*mean),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Class(usize),
    Value(f64),
}

pub fn predict_tree(tree: &Tree, x: &[f64]) -> Result<Prediction> {
    tree.predict(x)
}
