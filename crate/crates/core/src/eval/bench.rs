use std::time::Instant;

use serde::Serialize;

use crate::data::SyntheticSpec;
use crate::error::{Error, Result};
use crate::forest::{train_forest, Variant, VariantConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub variant: Variant,
    pub n: usize,
    pub dim: usize,
    pub trees: usize,
    /// Fastest of the repetitions.
    pub seconds: f64,
}

/// Time at one size divided by time at the previous size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRatio {
    pub variant: Variant,
    pub n_from: usize,
    pub n_to: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub ratios: Vec<ScalingRatio>,
}

impl BenchReport {
    pub fn seconds(&self, variant: Variant, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.n == n)
            .map(|r| r.seconds)
    }
}

/// Wall-clock `train_forest` time per configuration and size, each the
/// minimum over `reps` runs. Repetitions are interleaved across sizes and
/// configurations so slow drift in machine load hits every cell alike.
/// Training sets come from `family` with its own seed, so every
/// configuration sees the same data at a given size.
///
/// Thread count is whatever the calling rayon pool provides.
pub fn bench_runtime(family: &SyntheticSpec, sizes: &[usize], cfgs: &[VariantConfig], reps: usize) -> Result<BenchReport> {
    if sizes.len() < 2 {
        return Err(Error::param("sizes", "need at least two sizes"));
    }
    if cfgs.is_empty() {
        return Err(Error::param("variants", "need at least one configuration"));
    }
    if reps == 0 {
        return Err(Error::param("reps", "need at least one repetition"));
    }
    let datasets = sizes.iter().map(|&n| family.generate(n)).collect::<Result<Vec<_>>>()?;
    let mut best = vec![f64::INFINITY; sizes.len() * cfgs.len()];
    for _ in 0..reps {
        for (data, cells) in datasets.iter().zip(best.chunks_mut(cfgs.len())) {
            for (cfg, cell) in cfgs.iter().zip(cells) {
                let start = Instant::now();
                std::hint::black_box(train_forest(data, cfg)?);
                *cell = cell.min(start.elapsed().as_secs_f64());
            }
        }
    }
    let rows: Vec<BenchRow> = sizes
        .iter()
        .flat_map(|&n| cfgs.iter().map(move |cfg| (n, cfg)))
        .zip(&best)
        .map(|((n, cfg), &seconds)| BenchRow {
            variant: cfg.variant,
            n,
            dim: family.dim,
            trees: cfg.trees,
            seconds,
        })
        .collect();
    let ratios = cfgs
        .iter()
        .enumerate()
        .flat_map(|(c, cfg)| {
            let rows = &rows;
            sizes.windows(2).enumerate().map(move |(i, w)| ScalingRatio {
                variant: cfg.variant,
                n_from: w[0],
                n_to: w[1],
                ratio: rows[(i + 1) * cfgs.len() + c].seconds / rows[i * cfgs.len() + c].seconds,
            })
        })
        .collect();
    Ok(BenchReport { rows, ratios })
}
