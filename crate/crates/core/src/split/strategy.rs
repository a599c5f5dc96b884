//! Split-point selection rules.
//!
//! All strategies return `None` exactly when no feature they consider has an
//! admissible threshold.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::sampling::sample_by_reduction;
use super::table::{node_thresholds, ReductionTable, SplitContext};
use crate::data::IndexView;
use crate::error::{Error, Result};

/// `x[feature] <= threshold` goes left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPoint {
    pub feature: usize,
    pub threshold: f64,
}

impl SplitPoint {
    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        x[self.feature] <= self.threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitVariant {
    /// Bernoulli gate between the best split and two multinomial draws.
    Dmrf,
    /// Reduction-maximizing split over a `⌊√D⌋` subspace.
    Best,
    /// Two Bernoulli gates: subspace size, then random vs best threshold.
    Brf,
    /// Two multinomial draws over the full feature space.
    Mrf,
    /// Poisson-sized subspace, thresholds from preselected points.
    Denil14,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitStrategyConfig {
    pub variant: SplitVariant,
    /// Probability of taking the best split (DMRF).
    pub p: f64,
    /// Feature temperature.
    pub b1: f64,
    /// Threshold temperature.
    pub b2: f64,
    /// Probability of a single-feature subspace (BRF).
    pub p1: f64,
    /// Probability of a uniformly random threshold (BRF).
    pub p2: f64,
    /// Poisson mean of the extra subspace size (Denil14).
    pub lambda: f64,
    /// Preselected structure points per node (Denil14).
    pub m: usize,
}

impl SplitStrategyConfig {
    pub fn new(variant: SplitVariant) -> Self {
        SplitStrategyConfig {
            variant,
            p: 0.5,
            b1: 5.0,
            b2: 5.0,
            p1: 0.05,
            p2: 0.05,
            lambda: 10.0,
            m: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("{v} is not a probability")));
            }
        }
        for (name, v) in [("b1", self.b1), ("b2", self.b2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("{v} must be finite and >= 0")));
            }
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{} must be > 0", self.lambda)));
        }
        if self.m == 0 {
            return Err(Error::param("m", "must be at least 1"));
        }
        Ok(())
    }
}

/// `⌊√D⌋`, at least 1.
pub fn subspace_size(n_features: usize) -> usize {
    n_features.isqrt().max(1)
}

/// `size` distinct features drawn uniformly, returned ascending.
pub fn sample_subspace<R: Rng + ?Sized>(rng: &mut R, n_features: usize, size: usize) -> Vec<usize> {
    let mut v = index::sample(rng, n_features, size.min(n_features)).into_vec();
    v.sort_unstable();
    v
}

fn point(table: &ReductionTable, pos: usize, threshold: usize) -> SplitPoint {
    let f = &table.features[pos];
    SplitPoint {
        feature: f.feature,
        threshold: f.thresholds[threshold],
    }
}

pub fn best_split(view: &IndexView<'_>, subspace: &[usize], ctx: &SplitContext) -> Option<SplitPoint> {
    let table = ReductionTable::build(view, subspace, ctx);
    table.argmax().map(|(k, t)| point(&table, k, t))
}

/// Feature from `softmax(b1 · normalize(maxima))`, then threshold from
/// `softmax(b2 · normalize(reductions))` of that feature.
fn multinomial_split<R: Rng + ?Sized>(table: &ReductionTable, b1: f64, b2: f64, rng: &mut R) -> Option<SplitPoint> {
    if table.is_empty() {
        return None;
    }
    let k = sample_by_reduction(&table.maxima(), b1, rng);
    let t = sample_by_reduction(&table.features[k].reductions, b2, rng);
    Some(point(table, k, t))
}

pub fn dmrf_split<R: Rng + ?Sized>(
    view: &IndexView<'_>,
    subspace: &[usize],
    cfg: &SplitStrategyConfig,
    ctx: &SplitContext,
    rng: &mut R,
) -> Option<SplitPoint> {
    let take_best = rng.random_bool(cfg.p);
    let table = ReductionTable::build(view, subspace, ctx);
    if take_best {
        table.argmax().map(|(k, t)| point(&table, k, t))
    } else {
        multinomial_split(&table, cfg.b1, cfg.b2, rng)
    }
}

pub fn mrf_split<R: Rng + ?Sized>(
    view: &IndexView<'_>,
    cfg: &SplitStrategyConfig,
    ctx: &SplitContext,
    rng: &mut R,
) -> Option<SplitPoint> {
    let all: Vec<usize> = (0..view.data().n_features()).collect();
    let table = ReductionTable::build(view, &all, ctx);
    multinomial_split(&table, cfg.b1, cfg.b2, rng)
}

pub fn brf_split<R: Rng + ?Sized>(
    view: &IndexView<'_>,
    cfg: &SplitStrategyConfig,
    ctx: &SplitContext,
    rng: &mut R,
) -> Option<SplitPoint> {
    let d = view.data().n_features();
    let single = rng.random_bool(cfg.p1);
    let subspace = sample_subspace(rng, d, if single { 1 } else { subspace_size(d) });
    let random_threshold = rng.random_bool(cfg.p2);

    if single && random_threshold {
        let feature = subspace[0];
        let thresholds = node_thresholds(view, feature, ctx.min_child);
        if thresholds.is_empty() {
            return None;
        }
        let t = rng.random_range(0..thresholds.len());
        return Some(SplitPoint {
            feature,
            threshold: thresholds[t],
        });
    }
    let table = ReductionTable::build(view, &subspace, ctx);
    let (k, best_t) = table.argmax()?;
    let t = if random_threshold {
        rng.random_range(0..table.features[k].thresholds.len())
    } else {
        best_t
    };
    Some(point(&table, k, t))
}

pub fn denil14_split<R: Rng + ?Sized>(
    view: &IndexView<'_>,
    cfg: &SplitStrategyConfig,
    ctx: &SplitContext,
    rng: &mut R,
) -> Option<SplitPoint> {
    let d = view.data().n_features();
    let extra = Poisson::new(cfg.lambda)
        .expect("validated lambda")
        .sample(rng) as usize;
    let subspace = sample_subspace(rng, d, extra.saturating_add(1).min(d));
    let m = cfg.m.min(view.len());
    let preselected: Vec<usize> = index::sample(rng, view.len(), m)
        .into_iter()
        .map(|pos| view.indices()[pos])
        .collect();
    let table = ReductionTable::build_restricted(view, &subspace, ctx, Some(&preselected));
    table.argmax().map(|(k, t)| point(&table, k, t))
}

/// Dispatches on the configured variant, drawing a fresh `⌊√D⌋` subspace
/// for the variants that use one.
pub fn choose_split<R: Rng + ?Sized>(
    view: &IndexView<'_>,
    cfg: &SplitStrategyConfig,
    ctx: &SplitContext,
    rng: &mut R,
) -> Option<SplitPoint> {
    let d = view.data().n_features();
    match cfg.variant {
        SplitVariant::Best => {
            let subspace = sample_subspace(rng, d, subspace_size(d));
            best_split(view, &subspace, ctx)
        }
        SplitVariant::Dmrf => {
            let subspace = sample_subspace(rng, d, subspace_size(d));
            dmrf_split(view, &subspace, cfg, ctx, rng)
        }
        SplitVariant::Brf => brf_split(view, cfg, ctx, rng),
        SplitVariant::Mrf => mrf_split(view, cfg, ctx, rng),
        SplitVariant::Denil14 => denil14_split(view, cfg, ctx, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::rng::stream_rng;
    use crate::split::table::Criterion;

    fn gini_ctx(c: usize) -> SplitContext {
        SplitContext::new(Criterion::Gini { n_classes: c })
    }

    #[test]
    fn subspace_sizes() {
        assert_eq!(subspace_size(1), 1);
        assert_eq!(subspace_size(3), 1);
        assert_eq!(subspace_size(4), 2);
        assert_eq!(subspace_size(20), 4);
        let s = sample_subspace(&mut stream_rng(0, 0), 20, 4);
        assert_eq!(s.len(), 4);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn best_split_separable_1d() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let d = Dataset::classification(rows, vec![0, 0, 1, 1], 2).unwrap();
        let idx = [0, 1, 2, 3];
        let view = IndexView::new(&d, &idx).unwrap();
        assert_eq!(
            best_split(&view, &[0], &gini_ctx(2)),
            Some(SplitPoint {
                feature: 0,
                threshold: 1.0
            })
        );
    }

    #[test]
    fn best_split_picks_separating_feature() {
        let rows = vec![
            vec![5.0, 0.0],
            vec![1.0, 1.0],
            vec![4.0, 2.0],
            vec![2.0, 3.0],
        ];
        let d = Dataset::classification(rows, vec![0, 0, 1, 1], 2).unwrap();
        let idx = [0, 1, 2, 3];
        let view = IndexView::new(&d, &idx).unwrap();
        let s = best_split(&view, &[0, 1], &gini_ctx(2)).unwrap();
        assert_eq!((s.feature, s.threshold), (1, 1.0));
    }

    #[test]
    fn constant_features_give_none() {
        let rows = vec![vec![1.0, 2.0]; 5];
        let d = Dataset::classification(rows, vec![0, 1, 0, 1, 0], 2).unwrap();
        let idx = [0, 1, 2, 3, 4];
        let view = IndexView::new(&d, &idx).unwrap();
        let ctx = gini_ctx(2);
        let mut rng = stream_rng(1, 1);
        assert_eq!(best_split(&view, &[0, 1], &ctx), None);
        for variant in [
            SplitVariant::Dmrf,
            SplitVariant::Best,
            SplitVariant::Brf,
            SplitVariant::Mrf,
            SplitVariant::Denil14,
        ] {
            let cfg = SplitStrategyConfig::new(variant);
            assert_eq!(choose_split(&view, &cfg, &ctx, &mut rng), None, "{variant:?}");
        }
    }

    fn noisy_node(seed: u64, n: usize, d: usize) -> Dataset {
        let mut rng = stream_rng(seed, 9);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(0..8) as f64).collect())
            .collect();
        let codes = rows
            .iter()
            .map(|r| usize::from(r[0] + rng.random_range(0.0..3.0) > 5.0))
            .collect();
        Dataset::classification(rows, codes, 2).unwrap()
    }

    #[test]
    fn brf_with_gates_off_is_best_split() {
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Brf);
        cfg.p1 = 0.0;
        cfg.p2 = 0.0;
        let ctx = gini_ctx(2);
        for seed in 0..20 {
            let d = noisy_node(seed, 30, 9);
            let idx: Vec<usize> = (0..30).collect();
            let view = IndexView::new(&d, &idx).unwrap();
            let mut rng = stream_rng(seed, 2);
            let mut replay = rng.clone();
            let got = brf_split(&view, &cfg, &ctx, &mut rng);
            replay.random_bool(0.0);
            let subspace = sample_subspace(&mut replay, 9, 3);
            assert_eq!(got, best_split(&view, &subspace, &ctx));
        }
    }

    #[test]
    fn brf_with_gates_on_is_uniform() {
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Brf);
        cfg.p1 = 1.0;
        cfg.p2 = 1.0;
        let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, (3 - i) as f64]).collect();
        let d = Dataset::classification(rows, vec![0, 0, 0, 1], 2).unwrap();
        let idx = [0, 1, 2, 3];
        let view = IndexView::new(&d, &idx).unwrap();
        let mut rng = stream_rng(3, 3);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..6000 {
            let s = brf_split(&view, &cfg, &gini_ctx(2), &mut rng).unwrap();
            *counts.entry((s.feature, s.threshold as i64)).or_insert(0usize) += 1;
        }
        // two features × three thresholds, each ≈ 1000
        assert_eq!(counts.len(), 6);
        assert!(counts.values().all(|&c| (850..=1150).contains(&c)), "{counts:?}");
    }

    #[test]
    fn mrf_single_feature_still_samples_threshold() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let d = Dataset::classification(rows, vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let idx: Vec<usize> = (0..6).collect();
        let view = IndexView::new(&d, &idx).unwrap();
        let cfg = SplitStrategyConfig::new(SplitVariant::Mrf);
        let mut rng = stream_rng(8, 0);
        let seen: std::collections::BTreeSet<i64> = (0..2000)
            .map(|_| mrf_split(&view, &cfg, &gini_ctx(2), &mut rng).unwrap().threshold as i64)
            .collect();
        assert!(seen.len() > 1);
        assert!(seen.contains(&2));
    }

    #[test]
    fn denil14_without_binding_preselection_is_best() {
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Denil14);
        cfg.m = 1000;
        cfg.lambda = 50.0;
        let ctx = gini_ctx(2);
        for seed in 0..10 {
            let d = noisy_node(seed, 40, 4);
            let idx: Vec<usize> = (0..40).collect();
            let view = IndexView::new(&d, &idx).unwrap();
            let got = denil14_split(&view, &cfg, &ctx, &mut stream_rng(seed, 5));
            // Poisson(50) + 1 always exceeds D = 4, so the subspace is everything.
            assert_eq!(got, best_split(&view, &[0, 1, 2, 3], &ctx));
        }
    }

    #[test]
    fn denil14_thresholds_come_from_preselected_points() {
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Denil14);
        cfg.m = 3;
        let d = noisy_node(4, 50, 2);
        let idx: Vec<usize> = (0..50).collect();
        let view = IndexView::new(&d, &idx).unwrap();
        let mut rng = stream_rng(4, 1);
        for _ in 0..200 {
            if let Some(s) = denil14_split(&view, &cfg, &gini_ctx(2), &mut rng) {
                assert!((0..50).any(|i| d.value(i, s.feature) == s.threshold));
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Dmrf);
        assert!(cfg.validate().is_ok());
        cfg.p = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Dmrf);
        cfg.b1 = f64::INFINITY;
        assert!(cfg.validate().is_err());
        let mut cfg = SplitStrategyConfig::new(SplitVariant::Denil14);
        cfg.lambda = 0.0;
        assert!(cfg.validate().is_err());
        cfg.lambda = 1.0;
        cfg.m = 0;
        assert!(cfg.validate().is_err());
    }
}
