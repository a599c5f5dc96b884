use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::mean;
use crate::data::{Dataset, SyntheticSpec, Task};
use crate::error::{Error, Result};
use crate::forest::{train_forest, VariantConfig};
use crate::rng::{derive_seed, stream_rng, streams};

/// Minimum node size as a function of the training-set size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum KnRule {
    /// `ceil(n^alpha)`, ignoring rounding error in the power.
    Pow(f64),
    Const(usize),
}

impl KnRule {
    pub fn k_n(&self, n: usize) -> usize {
        match *self {
            KnRule::Pow(alpha) => (((n as f64).powf(alpha) - 1e-9).ceil() as usize).max(1),
            KnRule::Const(k) => k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KnRule::Pow(alpha) if !(alpha > 0.0 && alpha < 1.0) => Err(Error::param(
                "kn-rule",
                format!("exponent {alpha} is outside (0, 1)"),
            )),
            KnRule::Const(0) => Err(Error::param("kn-rule", "constant must be at least 1")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KnRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnRule::Pow(a) => write!(f, "pow:{a}"),
            KnRule::Const(k) => write!(f, "const:{k}"),
        }
    }
}

impl FromStr for KnRule {
    type Err = Error;

    /// `pow:0.6`, `n^0.6`, `const:5` or a bare integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::param("kn-rule", format!("cannot parse `{s}`"));
        let rule = if let Some(a) = s.strip_prefix("pow:").or_else(|| s.strip_prefix("n^")) {
            KnRule::Pow(a.parse().map_err(|_| bad())?)
        } else if let Some(k) = s.strip_prefix("const:") {
            KnRule::Const(k.parse().map_err(|_| bad())?)
        } else {
            KnRule::Const(s.parse().map_err(|_| bad())?)
        };
        rule.validate()?;
        Ok(rule)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyPoint {
    pub n: usize,
    pub k_n: usize,
    /// Test risk per seed: error rate, or mean squared deviation from the
    /// regression function.
    pub risks: Vec<f64>,
    pub mean_risk: f64,
    /// Mean risk minus the Bayes risk (classification only).
    pub excess_risk: Option<f64>,
}

fn risk(spec: &SyntheticSpec, cfg: &VariantConfig, train: &Dataset, test: &Dataset) -> Result<f64> {
    let forest = train_forest(train, cfg)?;
    let n = test.n_rows() as f64;
    match spec.task() {
        Task::Classification => {
            let mut rng = stream_rng(cfg.seed, streams::VOTE_TIES);
            let mut wrong = 0usize;
            for i in 0..test.n_rows() {
                if forest.predict_class(test.row(i), &mut rng)? != test.class(i) {
                    wrong += 1;
                }
            }
            Ok(wrong as f64 / n)
        }
        Task::Regression => {
            let mut total = 0.0;
            for i in 0..test.n_rows() {
                let x = test.row(i);
                total += (forest.predict_value(x)? - SyntheticSpec::true_function(x)).powi(2);
            }
            Ok(total / n)
        }
    }
}

/// Test risk of forests trained with strict leaves and `k_n = rule(n)` on
/// growing samples from `spec`.
///
/// The test set of `test_size` points is drawn once from the seed
/// `derive_seed(spec.seed, u64::MAX)`. For each `n` and each entry `s` of
/// `seeds`, the training set and the forest both use `derive_seed(s, n)`.
pub fn consistency_curve(
    spec: &SyntheticSpec,
    schedule: &[usize],
    rule: KnRule,
    base: &VariantConfig,
    seeds: &[u64],
    test_size: usize,
) -> Result<Vec<ConsistencyPoint>> {
    spec.validate()?;
    rule.validate()?;
    if schedule.len() < 3 {
        return Err(Error::param("schedule", "need at least three sizes"));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("schedule", "sizes must be positive and strictly increasing"));
    }
    if seeds.is_empty() {
        return Err(Error::param("seeds", "need at least one seed"));
    }
    if test_size == 0 {
        return Err(Error::param("test-size", "must be at least 1"));
    }
    let mut probe = *base;
    probe.strict_leaf = true;
    probe.k_n = rule.k_n(schedule[0]);
    probe.validate()?;

    let test = spec.with_seed(derive_seed(spec.seed, u64::MAX)).generate(test_size)?;
    let jobs: Vec<(usize, u64)> = schedule
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let risks = jobs
        .par_iter()
        .map(|&(n, s)| {
            let run_seed = derive_seed(s, n as u64);
            let train = spec.with_seed(run_seed).generate(n)?;
            let mut cfg = *base;
            cfg.strict_leaf = true;
            cfg.k_n = rule.k_n(n);
            cfg.seed = run_seed;
            risk(spec, &cfg, &train, &test)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(schedule
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let r = risks[i * seeds.len()..(i + 1) * seeds.len()].to_vec();
            let mean_risk = mean(&r);
            ConsistencyPoint {
                n,
                k_n: rule.k_n(n),
                excess_risk: spec.bayes_risk().map(|b| mean_risk - b),
                mean_risk,
                risks: r,
            }
        })
        .collect())
}
