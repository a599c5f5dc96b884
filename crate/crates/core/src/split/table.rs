//! Per-feature impurity-reduction vectors for one node.

use super::impurity::{gini_reduction_from_sumsq, MomentSums};
use crate::data::IndexView;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Gini { n_classes: usize },
    /// `weighted = false` is the unweighted children form.
    Mse { weighted: bool },
}

/// Node-independent settings shared by every split evaluation in a tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitContext {
    pub criterion: Criterion,
    /// Smallest admissible child; 1 admits every threshold that leaves both
    /// children nonempty.
    pub min_child: usize,
}

impl SplitContext {
    pub fn new(criterion: Criterion) -> Self {
        SplitContext {
            criterion,
            min_child: 1,
        }
    }
}

/// Reductions of every admissible threshold of one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureReductions {
    pub feature: usize,
    /// Ascending; `x <= threshold` goes left.
    pub thresholds: Vec<f64>,
    pub reductions: Vec<f64>,
    /// Position of the first maximal reduction.
    pub best: usize,
}

impl FeatureReductions {
    pub fn max(&self) -> f64 {
        self.reductions[self.best]
    }
}

/// Reductions for the splittable features of a subspace, in subspace order.
/// Features without admissible thresholds are left out.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReductionTable {
    pub features: Vec<FeatureReductions>,
}

impl ReductionTable {
    pub fn build(view: &IndexView<'_>, subspace: &[usize], ctx: &SplitContext) -> Self {
        Self::build_restricted(view, subspace, ctx, None)
    }

    /// Like [`ReductionTable::build`], but only thresholds equal to a feature
    /// value of one of the `allowed` rows are admissible.
    pub fn build_restricted(
        view: &IndexView<'_>,
        subspace: &[usize],
        ctx: &SplitContext,
        allowed: Option<&[usize]>,
    ) -> Self {
        let mut sweep = Sweep::new(view, ctx);
        let features = subspace
            .iter()
            .filter_map(|&j| {
                let allowed_values = allowed.map(|rows| {
                    let mut v: Vec<f64> = rows.iter().map(|&i| view.data().value(i, j)).collect();
                    v.sort_by(f64::total_cmp);
                    v.dedup();
                    v
                });
                sweep.run(j, allowed_values.as_deref())
            })
            .collect();
        ReductionTable { features }
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// The maximal `(position, threshold index)`; ties go to the earlier
    /// feature, then the lower threshold.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, f) in self.features.iter().enumerate() {
            if best.is_none_or(|(_, v)| f.max() > v) {
                best = Some((k, f.max()));
            }
        }
        best.map(|(k, _)| (k, self.features[k].best))
    }

    pub fn maxima(&self) -> Vec<f64> {
        self.features.iter().map(FeatureReductions::max).collect()
    }
}

enum Target {
    Class(usize),
    Value(f64),
}

struct Sweep<'a> {
    view: IndexView<'a>,
    ctx: SplitContext,
    pairs: Vec<(f64, usize)>,
    parent_counts: Vec<u64>,
    parent_sumsq: u64,
    parent_moments: MomentSums,
    parent_mean: f64,
}

impl<'a> Sweep<'a> {
    fn new(view: &IndexView<'a>, ctx: &SplitContext) -> Self {
        let data = view.data();
        let mut parent_counts = Vec::new();
        let mut parent_sumsq = 0;
        let mut parent_moments = MomentSums::default();
        let mut parent_mean = 0.0;
        match ctx.criterion {
            Criterion::Gini { n_classes } => {
                parent_counts = vec![0u64; n_classes];
                for &i in view.indices() {
                    parent_counts[data.class(i)] += 1;
                }
                parent_sumsq = parent_counts.iter().map(|c| c * c).sum();
            }
            Criterion::Mse { .. } => {
                parent_mean =
                    view.indices().iter().map(|&i| data.target(i)).sum::<f64>() / view.len() as f64;
                for &i in view.indices() {
                    parent_moments.push(data.target(i) - parent_mean);
                }
            }
        }
        Sweep {
            view: *view,
            ctx: *ctx,
            pairs: Vec::with_capacity(view.len()),
            parent_counts,
            parent_sumsq,
            parent_moments,
            parent_mean,
        }
    }

    fn target(&self, row: usize) -> Target {
        match self.ctx.criterion {
            Criterion::Gini { .. } => Target::Class(self.view.data().class(row)),
            Criterion::Mse { .. } => Target::Value(self.view.data().target(row) - self.parent_mean),
        }
    }

    fn run(&mut self, feature: usize, allowed: Option<&[f64]>) -> Option<FeatureReductions> {
        let data = self.view.data();
        self.pairs.clear();
        self.pairs
            .extend(self.view.indices().iter().map(|&i| (data.value(i, feature), i)));
        self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let n = self.pairs.len();
        let min_child = self.ctx.min_child.max(1);
        let mut thresholds = Vec::new();
        let mut reductions = Vec::new();

        let mut left_counts = vec![0u64; self.parent_counts.len()];
        let mut left_sumsq = 0u64;
        let mut left_moments = MomentSums::default();
        let parent_mse = self.parent_moments.mse();

        for k in 0..n - 1 {
            match self.target(self.pairs[k].1) {
                Target::Class(c) => {
                    left_sumsq += 2 * left_counts[c] + 1;
                    left_counts[c] += 1;
                }
                Target::Value(y) => left_moments.push(y),
            }
            let x = self.pairs[k].0;
            if self.pairs[k + 1].0 == x {
                continue;
            }
            let nl = k + 1;
            let nr = n - nl;
            if nl < min_child || nr < min_child {
                continue;
            }
            if let Some(vals) = allowed {
                if vals.binary_search_by(|v| v.total_cmp(&x)).is_err() {
                    continue;
                }
            }
            let reduction = match self.ctx.criterion {
                Criterion::Gini { .. } => {
                    let right_sumsq: u64 = self
                        .parent_counts
                        .iter()
                        .zip(&left_counts)
                        .map(|(p, l)| (p - l) * (p - l))
                        .sum();
                    gini_reduction_from_sumsq(n as u64, self.parent_sumsq, nl as u64, left_sumsq, nr as u64, right_sumsq)
                }
                Criterion::Mse { weighted } => {
                    let right = self.parent_moments.minus(&left_moments);
                    let (l, r) = (left_moments.mse(), right.mse());
                    if weighted {
                        parent_mse - nl as f64 / n as f64 * l - nr as f64 / n as f64 * r
                    } else {
                        parent_mse - l - r
                    }
                }
            };
            thresholds.push(x);
            reductions.push(reduction);
        }

        if thresholds.is_empty() {
            return None;
        }
        let best = first_argmax(&reductions);
        Some(FeatureReductions {
            feature,
            thresholds,
            reductions,
            best,
        })
    }
}

fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Sorted distinct values of one feature that leave both children with at
/// least `min_child` samples under `x <= v` routing.
pub fn node_thresholds(view: &IndexView<'_>, feature: usize, min_child: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = view
        .indices()
        .iter()
        .map(|&i| view.data().value(i, feature))
        .collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let min_child = min_child.max(1);
    (0..n.saturating_sub(1))
        .filter(|&k| xs[k + 1] != xs[k] && k + 1 >= min_child && n - k > min_child)
        .map(|k| xs[k])
        .collect()
}

/// Sorted distinct values, excluding the maximum (whose split would leave
/// the right child empty).
pub fn candidate_thresholds(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.pop();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::split::impurity::{gini_reduction, mse_reduction};

    #[test]
    fn candidate_threshold_examples() {
        assert_eq!(candidate_thresholds(&[3.0, 1.0, 3.0, 2.0]), vec![1.0, 2.0]);
        assert!(candidate_thresholds(&[4.0, 4.0]).is_empty());
        assert_eq!(candidate_thresholds(&[1.0, 2.0]), vec![1.0]);
    }

    #[test]
    fn table_matches_direct_reductions() {
        let rows = vec![vec![3.0], vec![1.0], vec![3.0], vec![2.0]];
        let d = Dataset::classification(rows, vec![1, 0, 1, 0], 2).unwrap();
        let idx = [0, 1, 2, 3];
        let view = IndexView::new(&d, &idx).unwrap();
        let ctx = SplitContext::new(Criterion::Gini { n_classes: 2 });
        let t = ReductionTable::build(&view, &[0], &ctx);
        let f = &t.features[0];
        assert_eq!(f.thresholds, vec![1.0, 2.0]);
        assert_eq!(f.reductions[0], gini_reduction(&[2, 2], &[1, 0], &[1, 2]).unwrap());
        assert_eq!(f.reductions[1], gini_reduction(&[2, 2], &[2, 0], &[0, 2]).unwrap());
        assert_eq!(f.best, 1);
        assert_eq!(t.argmax(), Some((0, 1)));
    }

    #[test]
    fn regression_table_matches_eq_values() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0]];
        let d = Dataset::regression(rows, vec![0.0, 0.0, 10.0]).unwrap();
        let idx = [0, 1, 2];
        let view = IndexView::new(&d, &idx).unwrap();
        let ctx = SplitContext::new(Criterion::Mse { weighted: false });
        let f = &ReductionTable::build(&view, &[0], &ctx).features[0];
        let want = [
            mse_reduction(&[0.0, 0.0, 10.0], &[0.0], &[0.0, 10.0]).unwrap(),
            mse_reduction(&[0.0, 0.0, 10.0], &[0.0, 0.0], &[10.0]).unwrap(),
        ];
        for (g, w) in f.reductions.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn constant_feature_is_dropped() {
        let rows = vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]];
        let d = Dataset::classification(rows, vec![0, 1, 1], 2).unwrap();
        let idx = [0, 1, 2];
        let view = IndexView::new(&d, &idx).unwrap();
        let ctx = SplitContext::new(Criterion::Gini { n_classes: 2 });
        let t = ReductionTable::build(&view, &[0, 1], &ctx);
        assert_eq!(t.features.len(), 1);
        assert_eq!(t.features[0].feature, 0);
        assert!(ReductionTable::build(&view, &[1], &ctx).is_empty());
    }

    #[test]
    fn min_child_and_allowed_filters() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let d = Dataset::classification(rows, vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let idx: Vec<usize> = (0..6).collect();
        let view = IndexView::new(&d, &idx).unwrap();
        let mut ctx = SplitContext::new(Criterion::Gini { n_classes: 2 });
        ctx.min_child = 2;
        let t = ReductionTable::build(&view, &[0], &ctx);
        assert_eq!(t.features[0].thresholds, vec![1.0, 2.0, 3.0]);
        assert_eq!(node_thresholds(&view, 0, 2), vec![1.0, 2.0, 3.0]);
        ctx.min_child = 1;
        let t = ReductionTable::build_restricted(&view, &[0], &ctx, Some(&[4, 1, 5]));
        assert_eq!(t.features[0].thresholds, vec![1.0, 4.0]);
    }
}
