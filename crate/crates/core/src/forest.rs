//! Ensembles of the eight named variants.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{structure_estimation_split, Dataset, IndexView, Schema, Task};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};
use crate::split::{SplitStrategyConfig, SplitVariant};
use crate::tree::{build_tree, LeafPayload, LeafRule, Tree, TrainingSet, TreeBuildConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "DMRF")]
    Dmrf,
    #[serde(rename = "BreimanRF")]
    BreimanRf,
    #[serde(rename = "BRF-SE")]
    BrfSe,
    #[serde(rename = "BRF-b")]
    BrfB,
    #[serde(rename = "MRF-SE")]
    MrfSe,
    #[serde(rename = "MRF-b")]
    MrfB,
    #[serde(rename = "Denil14-SE")]
    Denil14Se,
    #[serde(rename = "Denil14-b")]
    Denil14B,
}

/// How a tree's training rows are drawn from the forest's rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Each row kept independently with probability `q`.
    Bernoulli,
    /// `n` draws with replacement.
    Classical,
    /// Every row, partitioned into structure and estimation parts.
    StructureEstimation,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Dmrf,
        Variant::BreimanRf,
        Variant::BrfSe,
        Variant::BrfB,
        Variant::MrfSe,
        Variant::MrfB,
        Variant::Denil14Se,
        Variant::Denil14B,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Dmrf => "DMRF",
            Variant::BreimanRf => "BreimanRF",
            Variant::BrfSe => "BRF-SE",
            Variant::BrfB => "BRF-b",
            Variant::MrfSe => "MRF-SE",
            Variant::MrfB => "MRF-b",
            Variant::Denil14Se => "Denil14-SE",
            Variant::Denil14B => "Denil14-b",
        }
    }

    pub fn split_variant(self) -> SplitVariant {
        match self {
            Variant::Dmrf => SplitVariant::Dmrf,
            Variant::BreimanRf => SplitVariant::Best,
            Variant::BrfSe | Variant::BrfB => SplitVariant::Brf,
            Variant::MrfSe | Variant::MrfB => SplitVariant::Mrf,
            Variant::Denil14Se | Variant::Denil14B => SplitVariant::Denil14,
        }
    }

    pub fn sampling(self) -> Sampling {
        match self {
            Variant::BreimanRf => Sampling::Classical,
            Variant::BrfSe | Variant::MrfSe | Variant::Denil14Se => Sampling::StructureEstimation,
            _ => Sampling::Bernoulli,
        }
    }

    pub fn leaf_rule(self) -> LeafRule {
        match self {
            Variant::MrfSe => LeafRule::Sampled,
            _ => LeafRule::Majority,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::param("variant", format!("unknown variant `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Every hyperparameter of one forest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub variant: Variant,
    /// Number of trees `M`.
    pub trees: usize,
    /// Per-row inclusion probability of the Bernoulli bootstrap.
    pub q: f64,
    pub k_n: usize,
    pub p: f64,
    pub b1: f64,
    pub b2: f64,
    pub p1: f64,
    pub p2: f64,
    pub lambda: f64,
    pub m: usize,
    /// Structure share of the SE partition.
    pub ratio: f64,
    pub strict_leaf: bool,
    pub weighted_mse: bool,
    pub seed: u64,
}

impl VariantConfig {
    pub fn new(variant: Variant) -> Self {
        let s = SplitStrategyConfig::new(variant.split_variant());
        VariantConfig {
            variant,
            trees: 100,
            q: 1.0 - (-1.0f64).exp(),
            k_n: 5,
            p: s.p,
            b1: s.b1,
            b2: s.b2,
            p1: s.p1,
            p2: s.p2,
            lambda: s.lambda,
            m: s.m,
            ratio: 0.5,
            strict_leaf: false,
            weighted_mse: false,
            seed: 0,
        }
    }

    pub fn strategy(&self) -> SplitStrategyConfig {
        SplitStrategyConfig {
            variant: self.variant.split_variant(),
            p: self.p,
            b1: self.b1,
            b2: self.b2,
            p1: self.p1,
            p2: self.p2,
            lambda: self.lambda,
            m: self.m,
        }
    }

    pub fn tree_config(&self) -> TreeBuildConfig {
        TreeBuildConfig {
            strategy: self.strategy(),
            k_n: self.k_n,
            strict_leaf: self.strict_leaf,
            weighted_mse: self.weighted_mse,
            leaf_rule: self.variant.leaf_rule(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::param("trees", "need at least one tree"));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::param("q", format!("{} is outside (0, 1]", self.q)));
        }
        if self.variant.sampling() == Sampling::StructureEstimation && !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::param("ratio", format!("{} is outside (0, 1)", self.ratio)));
        }
        self.tree_config().validate()
    }
}

/// Rows `0..n` kept independently with probability `q`, redrawn until at
/// least one row survives.
pub fn bootstrap_indices<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Vec<usize> {
    assert!(n >= 1 && q > 0.0 && q <= 1.0, "bootstrap needs n >= 1 and q in (0, 1]");
    loop {
        let kept: Vec<usize> = (0..n).filter(|_| rng.random_bool(q)).collect();
        if !kept.is_empty() {
            return kept;
        }
    }
}

/// `n` draws with replacement from `0..n`, sorted.
pub fn classical_bootstrap<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut drawn: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    drawn.sort_unstable();
    drawn
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    schema: Schema,
    n_classes: usize,
    config: VariantConfig,
}

pub fn train_forest(data: &Dataset, cfg: &VariantConfig) -> Result<Forest> {
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    train_forest_on(data, &rows, cfg)
}

/// Trains on the given rows only. Tree `i` draws from stream
/// `TREE_BASE + i` of `cfg.seed`, so the result does not depend on the
/// number of worker threads.
pub fn train_forest_on(data: &Dataset, rows: &[usize], cfg: &VariantConfig) -> Result<Forest> {
    cfg.validate()?;
    let view = IndexView::new(data, rows)?;
    let tree_cfg = cfg.tree_config();
    let trees = (0..cfg.trees as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, streams::TREE_BASE + i);
            let pick = |positions: Vec<usize>| -> Vec<usize> { positions.into_iter().map(|k| rows[k]).collect() };
            match cfg.variant.sampling() {
                Sampling::Bernoulli => {
                    let sample = pick(bootstrap_indices(rows.len(), cfg.q, &mut rng));
                    build_tree(data, TrainingSet::Shared(&sample), &tree_cfg, &mut rng)
                }
                Sampling::Classical => {
                    let sample = pick(classical_bootstrap(rows.len(), &mut rng));
                    build_tree(data, TrainingSet::Shared(&sample), &tree_cfg, &mut rng)
                }
                Sampling::StructureEstimation => {
                    let (structure, estimation) = structure_estimation_split(&view, cfg.ratio, &mut rng)?;
                    build_tree(
                        data,
                        TrainingSet::Separate {
                            structure: &structure,
                            estimation: &estimation,
                        },
                        &tree_cfg,
                        &mut rng,
                    )
                }
            }
        })
        .collect::<Result<Vec<Tree>>>()?;
    Ok(Forest {
        trees,
        schema: data.schema().clone(),
        n_classes: if data.task() == Task::Classification {
            data.n_classes()
        } else {
            0
        },
        config: *cfg,
    })
}

impl Forest {
    /// Reassembles a forest, checking that every tree fits the schema.
    pub fn from_parts(trees: Vec<Tree>, schema: Schema, config: VariantConfig) -> Result<Self> {
        if trees.len() != config.trees {
            return Err(Error::param(
                "trees",
                format!("config declares {} trees, found {}", config.trees, trees.len()),
            ));
        }
        let n_classes = schema.class_names.len();
        for tree in &trees {
            if tree.n_features() != schema.n_features() {
                return Err(Error::DimensionMismatch {
                    expected: schema.n_features(),
                    found: tree.n_features(),
                });
            }
            for node in tree.nodes() {
                let ok = match (node, schema.task) {
                    (crate::tree::TreeNode::Leaf(LeafPayload::Class { votes, label, .. }), Task::Classification) => {
                        votes.len() == n_classes && *label < n_classes
                    }
                    (crate::tree::TreeNode::Leaf(LeafPayload::Value { .. }), Task::Regression) => true,
                    (crate::tree::TreeNode::Split { .. }, _) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::param("trees", "leaf payload does not match the schema"));
                }
            }
        }
        Ok(Forest {
            trees,
            n_classes: if schema.task == Task::Classification { n_classes } else { 0 },
            schema,
            config,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn config(&self) -> &VariantConfig {
        &self.config
    }

    pub fn task(&self) -> Task {
        self.schema.task
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.schema.n_features()
    }

    fn check(&self, x: &[f64], task: Task) -> Result<()> {
        if self.task() != task {
            return Err(Error::TaskMismatch {
                expected: task.name(),
            });
        }
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Number of trees voting for each class.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<usize>> {
        self.check(x, Task::Classification)?;
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            if let LeafPayload::Class { label, .. } = tree.leaf(x) {
                votes[*label] += 1;
            }
        }
        Ok(votes)
    }

    /// Majority vote; tied classes are resolved uniformly with `rng`.
    pub fn predict_class<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<usize> {
        let votes = self.votes(x)?;
        let top = *votes.iter().max().expect("at least one class");
        let tied: Vec<usize> = (0..votes.len()).filter(|&k| votes[k] == top).collect();
        Ok(if tied.len() == 1 {
            tied[0]
        } else {
            tied[rng.random_range(0..tied.len())]
        })
    }

    /// Mean of the trees' predictions.
    pub fn predict_value(&self, x: &[f64]) -> Result<f64> {
        self.check(x, Task::Regression)?;
        let sum: f64 = self
            .trees
            .iter()
            .map(|t| match t.leaf(x) {
                LeafPayload::Value { mean, .. } => *mean,
                LeafPayload::Class { .. } => unreachable!("regression forest"),
            })
            .sum();
        Ok(sum / self.trees.len() as f64)
    }
}
