use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{accuracy, mean, mean_squared_error, sample_std};
use crate::data::{kfold, Dataset, Task};
use crate::error::{Error, Result};
use crate::forest::{train_forest_on, Forest, VariantConfig};
use crate::rng::{derive_seed, stream_rng, streams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    /// Accuracy in `[0, 1]` or mean squared error.
    pub metric: f64,
    /// Wall-clock training plus prediction time.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub config: VariantConfig,
    pub task: Task,
    pub folds: Vec<FoldResult>,
    pub repeat_means: Vec<f64>,
    /// Mean over repeat means.
    pub mean: f64,
    /// Sample standard deviation of the repeat means.
    pub std: f64,
    /// Sample standard deviation over every fold.
    pub fold_std: f64,
}

impl EvalReport {
    pub fn metric_name(&self) -> &'static str {
        match self.task {
            Task::Classification => "accuracy",
            Task::Regression => "mse",
        }
    }

    /// `-mean` for regression reports.
    pub fn nmse(&self) -> Option<f64> {
        (self.task == Task::Regression).then_some(-self.mean)
    }

    pub fn total_seconds(&self) -> f64 {
        self.folds.iter().map(|f| f.seconds).sum()
    }
}

/// Accuracy or mean squared error of `forest` on `rows`. Vote ties draw from
/// `tie_seed`.
pub fn evaluate(forest: &Forest, data: &Dataset, rows: &[usize], tie_seed: u64) -> Result<f64> {
    match forest.task() {
        Task::Classification => {
            let mut rng = stream_rng(tie_seed, streams::VOTE_TIES);
            let predicted = rows
                .iter()
                .map(|&i| forest.predict_class(data.row(i), &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let truth: Vec<usize> = rows.iter().map(|&i| data.class(i)).collect();
            Ok(accuracy(&predicted, &truth))
        }
        Task::Regression => {
            let predicted = rows
                .iter()
                .map(|&i| forest.predict_value(data.row(i)))
                .collect::<Result<Vec<_>>>()?;
            let truth: Vec<f64> = rows.iter().map(|&i| data.target(i)).collect();
            Ok(mean_squared_error(&predicted, &truth))
        }
    }
}

/// `repeats` rounds of `k`-fold cross-validation.
///
/// Repeat `r` partitions with seed `derive_seed(seed, r)`; fold `f` of that
/// repeat trains with seed `derive_seed(repeat_seed, f + 1)`. `cfg.seed` is
/// ignored.
pub fn cross_validate(data: &Dataset, cfg: &VariantConfig, k: usize, repeats: usize, seed: u64) -> Result<EvalReport> {
    if repeats == 0 {
        return Err(Error::param("repeats", "need at least one repeat"));
    }
    cfg.validate()?;
    let splits = (0..repeats)
        .map(|r| {
            let repeat_seed = derive_seed(seed, r as u64);
            kfold(data.n_rows(), k, repeat_seed).map(|folds| (repeat_seed, folds))
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..repeats).flat_map(|r| (0..k).map(move |f| (r, f))).collect();
    let folds = jobs
        .par_iter()
        .map(|&(repeat, fold)| {
            let (repeat_seed, ref folds) = splits[repeat];
            let split = &folds[fold];
            let mut fold_cfg = *cfg;
            fold_cfg.seed = derive_seed(repeat_seed, fold as u64 + 1);
            let start = Instant::now();
            let forest = train_forest_on(data, &split.train, &fold_cfg)?;
            let metric = evaluate(&forest, data, &split.test, fold_cfg.seed)?;
            Ok(FoldResult {
                repeat,
                fold,
                metric,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let repeat_means: Vec<f64> = (0..repeats)
        .map(|r| mean(&folds[r * k..(r + 1) * k].iter().map(|f| f.metric).collect::<Vec<_>>()))
        .collect();
    let all: Vec<f64> = folds.iter().map(|f| f.metric).collect();
    Ok(EvalReport {
        config: *cfg,
        task: data.task(),
        mean: mean(&repeat_means),
        std: sample_std(&repeat_means),
        fold_std: sample_std(&all),
        repeat_means,
        folds,
    })
}
