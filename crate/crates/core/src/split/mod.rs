//! Impurity measures, reduction tables and split-selection rules.

pub mod impurity;
pub mod sampling;
pub mod strategy;
pub mod table;

pub use impurity::{gini, gini_reduction, mse, mse_reduction, weighted_mse_reduction};
pub use sampling::{normalize, sample_categorical, softmax_temp};
pub use strategy::{
    best_split, brf_split, choose_split, denil14_split, dmrf_split, mrf_split, sample_subspace,
    subspace_size, SplitPoint, SplitStrategyConfig, SplitVariant,
};
pub use table::{candidate_thresholds, node_thresholds, Criterion, FeatureReductions, ReductionTable, SplitContext};
