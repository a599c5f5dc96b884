//! Split selection checked against exhaustive enumeration written from
//! scratch here, with no use of the library's impurity code.

use std::cmp::Ordering;

use dmrf::data::{Dataset, IndexView};
use dmrf::rng::stream_rng;
use dmrf::split::{
    best_split, choose_split, dmrf_split, mrf_split, Criterion, SplitContext, SplitPoint, SplitStrategyConfig,
    SplitVariant,
};
use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Exact Gini reduction as a fraction `num / den`.
fn gini_fraction(parent: &[i128], left: &[i128]) -> (i128, i128) {
    let right: Vec<i128> = parent.iter().zip(left).map(|(p, l)| p - l).collect();
    let n: i128 = parent.iter().sum();
    let nl: i128 = left.iter().sum();
    let nr = n - nl;
    let sq = |v: &[i128]| v.iter().map(|c| c * c).sum::<i128>();
    // 1 - P/n² - nl/n (1 - L/nl²) - nr/n (1 - R/nr²) = L/(n nl) + R/(n nr) - P/n²
    (sq(left) * n * nr + sq(&right) * n * nl - sq(parent) * nl * nr, n * n * nl * nr)
}

fn cmp_fraction(a: (i128, i128), b: (i128, i128)) -> Ordering {
    (a.0 * b.1).cmp(&(b.0 * a.1))
}

fn distinct_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Every (feature, threshold) with both children nonempty, in feature then
/// threshold order.
fn enumerate(data: &Dataset, rows: &[usize], features: &[usize]) -> Vec<(usize, f64, Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for &j in features {
        let values = distinct_sorted(rows.iter().map(|&i| data.value(i, j)).collect());
        for &t in &values {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| data.value(i, j) <= t);
            if !l.is_empty() && !r.is_empty() {
                out.push((j, t, l, r));
            }
        }
    }
    out
}

fn oracle_gini(data: &Dataset, rows: &[usize], features: &[usize]) -> Option<SplitPoint> {
    let c = data.n_classes();
    let counts = |rs: &[usize]| {
        let mut v = vec![0i128; c];
        for &i in rs {
            v[data.class(i)] += 1;
        }
        v
    };
    let parent = counts(rows);
    let mut best: Option<((i128, i128), SplitPoint)> = None;
    for (feature, threshold, left, _) in enumerate(data, rows, features) {
        let value = gini_fraction(&parent, &counts(&left));
        if best.as_ref().is_none_or(|(b, _)| cmp_fraction(value, *b) == Ordering::Greater) {
            best = Some((value, SplitPoint { feature, threshold }));
        }
    }
    best.map(|(_, s)| s)
}

fn mean_sq(values: &[f64]) -> f64 {
    let m = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// All candidate splits with their unweighted MSE reductions.
fn oracle_mse(data: &Dataset, rows: &[usize], features: &[usize]) -> Vec<(SplitPoint, f64)> {
    let y = |rs: &[usize]| rs.iter().map(|&i| data.target(i)).collect::<Vec<_>>();
    let parent = mean_sq(&y(rows));
    enumerate(data, rows, features)
        .into_iter()
        .map(|(feature, threshold, l, r)| {
            (SplitPoint { feature, threshold }, parent - mean_sq(&y(&l)) - mean_sq(&y(&r)))
        })
        .collect()
}

fn random_class_node(seed: u64) -> (Dataset, Vec<usize>) {
    let mut rng = stream_rng(seed, 100);
    let n = rng.random_range(2..=20);
    let d = rng.random_range(1..=3);
    let c = rng.random_range(2..=4);
    let levels = rng.random_range(2..=6);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0..levels) as f64 * 0.5).collect())
        .collect();
    let codes = (0..n).map(|_| rng.random_range(0..c)).collect();
    (Dataset::classification(rows, codes, c).unwrap(), (0..n).collect())
}

fn gini_ctx(data: &Dataset) -> SplitContext {
    SplitContext::new(Criterion::Gini {
        n_classes: data.n_classes(),
    })
}

#[test]
fn best_split_matches_enumeration_on_200_nodes() {
    for seed in 0..200 {
        let (data, rows) = random_class_node(seed);
        let view = IndexView::new(&data, &rows).unwrap();
        let all: Vec<usize> = (0..data.n_features()).collect();
        let got = best_split(&view, &all, &gini_ctx(&data));
        assert_eq!(got, oracle_gini(&data, &rows, &all), "seed {seed}");
    }
}

#[test]
fn best_split_matches_enumeration_on_subsets_and_subspaces() {
    for seed in 0..300 {
        let (data, rows) = random_class_node(seed + 1000);
        let mut rng = stream_rng(seed, 101);
        let subset: Vec<usize> = rows.iter().copied().filter(|_| rng.random_bool(0.7)).collect();
        if subset.is_empty() {
            continue;
        }
        let features: Vec<usize> = (0..data.n_features()).filter(|_| rng.random_bool(0.6)).collect();
        if features.is_empty() {
            continue;
        }
        let view = IndexView::new(&data, &subset).unwrap();
        assert_eq!(
            best_split(&view, &features, &gini_ctx(&data)),
            oracle_gini(&data, &subset, &features),
            "seed {seed}"
        );
    }
}

#[test]
fn regression_best_split_matches_enumeration() {
    for seed in 0..200 {
        let mut rng = stream_rng(seed, 102);
        let n = rng.random_range(2..=20);
        let d = rng.random_range(1..=3);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(0..5) as f64).collect())
            .collect();
        let y = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let data = Dataset::regression(rows, y).unwrap();
        let idx: Vec<usize> = (0..n).collect();
        let all: Vec<usize> = (0..d).collect();
        let ctx = SplitContext::new(Criterion::Mse { weighted: false });
        let got = best_split(&IndexView::new(&data, &idx).unwrap(), &all, &ctx);
        let candidates = oracle_mse(&data, &idx, &all);
        let Some(got) = got else {
            assert!(candidates.is_empty());
            continue;
        };
        let best = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let chosen = candidates.iter().find(|c| c.0 == got).expect("chosen split is a candidate").1;
        assert!((chosen - best).abs() <= 1e-9, "seed {seed}: {chosen} vs {best}");
        let near_best: Vec<&(SplitPoint, f64)> = candidates.iter().filter(|c| best - c.1 <= 1e-9).collect();
        if near_best.len() == 1 {
            assert_eq!(got, near_best[0].0, "seed {seed}");
        }
    }
}

#[test]
fn dmrf_with_certain_gate_is_best_split() {
    let mut cfg = SplitStrategyConfig::new(SplitVariant::Dmrf);
    cfg.p = 1.0;
    for seed in 0..200 {
        let (data, rows) = random_class_node(seed + 5000);
        let view = IndexView::new(&data, &rows).unwrap();
        let all: Vec<usize> = (0..data.n_features()).collect();
        let ctx = gini_ctx(&data);
        let got = dmrf_split(&view, &all, &cfg, &ctx, &mut stream_rng(seed, 1));
        assert_eq!(got, best_split(&view, &all, &ctx), "seed {seed}");
    }
}

/// Feature 0 separates the classes, feature 1 half separates them, feature
/// 2 is noise; every feature has several thresholds.
fn fixed_node() -> (Dataset, Vec<usize>) {
    let mut rows = Vec::new();
    let mut codes = Vec::new();
    for i in 0..24 {
        let class = usize::from(i >= 12);
        rows.push(vec![i as f64, ((i % 12) / 2 + 6 * class) as f64 * 0.5 + (i % 3) as f64, (i * 7 % 5) as f64]);
        codes.push(class);
    }
    (Dataset::classification(rows, codes, 2).unwrap(), (0..24).collect())
}

#[test]
fn hot_temperatures_pick_the_argmax() {
    let (data, rows) = fixed_node();
    let view = IndexView::new(&data, &rows).unwrap();
    let ctx = gini_ctx(&data);
    let all = [0, 1, 2];
    let target = oracle_gini(&data, &rows, &all).unwrap();
    assert_eq!(target, SplitPoint { feature: 0, threshold: 11.0 });

    let mut cfg = SplitStrategyConfig::new(SplitVariant::Dmrf);
    cfg.p = 0.0;
    cfg.b1 = 100.0;
    cfg.b2 = 100.0;
    let mut rng = stream_rng(31, 0);
    let hits = (0..1000)
        .filter(|_| dmrf_split(&view, &all, &cfg, &ctx, &mut rng) == Some(target))
        .count();
    assert!(hits >= 990, "{hits}");

    cfg.variant = SplitVariant::Mrf;
    let hits = (0..1000)
        .filter(|_| mrf_split(&view, &cfg, &ctx, &mut rng) == Some(target))
        .count();
    assert!(hits >= 990, "{hits}");
}

fn chi_square_uniform(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

#[test]
fn cold_temperatures_are_uniform() {
    let (data, rows) = fixed_node();
    let view = IndexView::new(&data, &rows).unwrap();
    let ctx = gini_ctx(&data);
    let mut cfg = SplitStrategyConfig::new(SplitVariant::Dmrf);
    cfg.p = 0.0;
    cfg.b1 = 0.0;
    cfg.b2 = 0.0;
    let mut rng = stream_rng(32, 0);
    let mut features = [0usize; 3];
    let mut thresholds = vec![0usize; 23];
    for _ in 0..10_000 {
        let s = dmrf_split(&view, &[0, 1, 2], &cfg, &ctx, &mut rng).unwrap();
        features[s.feature] += 1;
        if s.feature == 0 {
            thresholds[s.threshold as usize] += 1;
        }
    }
    assert!(chi_square_uniform(&features) > 0.01, "{features:?}");
    assert!(chi_square_uniform(&thresholds) > 0.01, "{thresholds:?}");
}

fn arb_node() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
    (1usize..4, 1usize..15).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(prop::collection::vec(prop::sample::select(vec![0.0, 1.0, 2.5]), d), n),
            prop::collection::vec(0usize..2, n),
        )
    })
}

proptest! {
    #[test]
    fn strategies_return_none_iff_nothing_is_splittable((rows, codes) in arb_node(), seed in any::<u64>()) {
        let d = rows[0].len();
        let n = rows.len();
        let splittable = (0..d).any(|j| rows.iter().any(|r| r[j] != rows[0][j]));
        let data = Dataset::classification(rows, codes, 2).unwrap();
        let idx: Vec<usize> = (0..n).collect();
        let view = IndexView::new(&data, &idx).unwrap();
        let ctx = gini_ctx(&data);
        let all: Vec<usize> = (0..d).collect();
        prop_assert_eq!(best_split(&view, &all, &ctx).is_some(), splittable);
        let mut rng = stream_rng(seed, 0);
        for variant in [SplitVariant::Dmrf, SplitVariant::Mrf] {
            let cfg = SplitStrategyConfig::new(variant);
            let got = match variant {
                SplitVariant::Dmrf => dmrf_split(&view, &all, &cfg, &ctx, &mut rng),
                _ => mrf_split(&view, &cfg, &ctx, &mut rng),
            };
            prop_assert_eq!(got.is_some(), splittable);
        }
        // Subspace-sampling strategies can only split when something is splittable.
        for variant in [SplitVariant::Best, SplitVariant::Brf, SplitVariant::Denil14] {
            let cfg = SplitStrategyConfig::new(variant);
            if choose_split(&view, &cfg, &ctx, &mut rng).is_some() {
                prop_assert!(splittable);
            }
        }
    }
}
