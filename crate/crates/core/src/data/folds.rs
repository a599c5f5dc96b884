use rand::seq::SliceRandom;
use rand::Rng;

use super::IndexView;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffled k-fold partition of `0..n`. Test sets partition the range and
/// differ in size by at most one; both sides of each fold are sorted.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::param("folds", format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::param(
            "folds",
            format!("{k} folds requested for {n} samples"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream_rng(seed, streams::FOLDS));

    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut test = order[start..start + len].to_vec();
        test.sort_unstable();
        let mut in_test = vec![false; n];
        for &i in &test {
            in_test[i] = true;
        }
        let train = (0..n).filter(|&i| !in_test[i]).collect();
        folds.push(Fold { train, test });
        start += len;
    }
    Ok(folds)
}

/// Randomly splits a view into a structure part of `round(ratio * len)`
/// indices (halves round up) and an estimation part holding the rest.
pub fn structure_estimation_split<R: Rng + ?Sized>(
    view: &IndexView<'_>,
    ratio: f64,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::param("ratio", format!("{ratio} is outside (0, 1)")));
    }
    let len = view.len();
    let n_structure = (ratio * len as f64 + 0.5).floor() as usize;
    if n_structure == 0 || n_structure >= len {
        return Err(Error::param(
            "ratio",
            format!("ratio {ratio} leaves an empty part of a {len}-sample view"),
        ));
    }
    let mut shuffled = view.indices().to_vec();
    shuffled.shuffle(rng);
    let estimation = shuffled.split_off(n_structure);
    Ok((shuffled, estimation))
}
