//! Synthetic distributions with closed-form optima, used to probe
//! consistency empirically.
//!
//! - Noisy threshold: `X ~ U[0,1]^D`, label `1` when `x₀ > 0.5` else `2`,
//!   flipped with probability `noise`. The Bayes risk equals `noise`.
//! - Smooth regression: `X ~ U[0,1]^D`, `Y = sin(2π x₀)·x₁ + ε` with
//!   `ε ~ N(0, noise)` (`noise` is the variance).

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Dataset, Schema, Targets, Task};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    NoisyThreshold,
    SmoothRegression,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub dim: usize,
    /// Flip probability (classification) or noise variance (regression).
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SyntheticKind::NoisyThreshold => {
                if self.dim < 1 {
                    return Err(Error::param("dim", "need at least one feature"));
                }
                if !(0.0..0.5).contains(&self.noise) {
                    return Err(Error::param(
                        "noise",
                        format!("flip probability {} outside [0, 0.5)", self.noise),
                    ));
                }
            }
            SyntheticKind::SmoothRegression => {
                if self.dim < 2 {
                    return Err(Error::param("dim", "regression target uses two features"));
                }
                if !(self.noise >= 0.0 && self.noise.is_finite()) {
                    return Err(Error::param(
                        "noise",
                        format!("variance {} must be finite and >= 0", self.noise),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn task(&self) -> Task {
        match self.kind {
            SyntheticKind::NoisyThreshold => Task::Classification,
            SyntheticKind::SmoothRegression => Task::Regression,
        }
    }

    /// Bayes risk of the classification distribution.
    pub fn bayes_risk(&self) -> Option<f64> {
        match self.kind {
            SyntheticKind::NoisyThreshold => Some(self.noise),
            SyntheticKind::SmoothRegression => None,
        }
    }

    /// Class code predicted by the Bayes classifier (code 0 is label `1`).
    pub fn bayes_class(x: &[f64]) -> usize {
        usize::from(x[0] <= 0.5)
    }

    /// The regression function `E[Y | X = x]`.
    pub fn true_function(x: &[f64]) -> f64 {
        (2.0 * std::f64::consts::PI * x[0]).sin() * x[1]
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SyntheticSpec { seed, ..self }
    }

    pub fn generate(&self, n: usize) -> Result<Dataset> {
        match self.kind {
            SyntheticKind::NoisyThreshold => synth_classification(self, n),
            SyntheticKind::SmoothRegression => synth_regression(self, n),
        }
    }
}

fn uniform_rows<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Vec<f64> {
    (0..n * dim).map(|_| rng.random::<f64>()).collect()
}

fn schema(dim: usize, task: Task, class_names: Vec<String>) -> Schema {
    Schema {
        feature_names: (0..dim).map(|j| format!("x{j}")).collect(),
        feature_kinds: vec![super::FeatureKind::Numeric; dim],
        label_name: "y".into(),
        label_column: dim,
        task,
        class_names,
    }
}

pub fn synth_classification(spec: &SyntheticSpec, n: usize) -> Result<Dataset> {
    if spec.kind != SyntheticKind::NoisyThreshold {
        return Err(Error::TaskMismatch {
            expected: "noisy-threshold classification",
        });
    }
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, streams::SYNTH);
    let features = uniform_rows(&mut rng, n, spec.dim);
    let codes = (0..n)
        .map(|i| {
            let clean = SyntheticSpec::bayes_class(&features[i * spec.dim..]);
            if rng.random::<f64>() < spec.noise {
                1 - clean
            } else {
                clean
            }
        })
        .collect();
    Dataset::from_flat(
        features,
        spec.dim,
        Targets::Classes { codes, n_classes: 2 },
        schema(spec.dim, Task::Classification, vec!["1".into(), "2".into()]),
    )
}

pub fn synth_regression(spec: &SyntheticSpec, n: usize) -> Result<Dataset> {
    if spec.kind != SyntheticKind::SmoothRegression {
        return Err(Error::TaskMismatch {
            expected: "smooth regression",
        });
    }
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, streams::SYNTH);
    let features = uniform_rows(&mut rng, n, spec.dim);
    let noise = Normal::new(0.0, spec.noise.sqrt()).expect("validated variance");
    let values = (0..n)
        .map(|i| SyntheticSpec::true_function(&features[i * spec.dim..]) + noise.sample(&mut rng))
        .collect();
    Dataset::from_flat(
        features,
        spec.dim,
        Targets::Values(values),
        schema(spec.dim, Task::Regression, Vec::new()),
    )
}
