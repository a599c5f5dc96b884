//! Min-max normalization, temperature softmax and categorical draws.

use rand::Rng;

use crate::error::{Error, Result};

/// `(v - min) / (max - min)`; all zeros when the vector is constant.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&v| ((v - min) / span).clamp(0.0, 1.0)).collect()
}

/// `exp(B·v_i) / Σ_j exp(B·v_j)`, evaluated after shifting by the maximum.
pub fn softmax_temp(values: &[f64], temperature: f64) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = values
        .iter()
        .map(|&v| (temperature * (v - max)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Draws index `i` with probability `probs[i]`.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<usize> {
    if probs.is_empty() {
        return Err(Error::BadProbabilities("empty".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::BadProbabilities(format!("entry {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadProbabilities(format!("sums to {total}")));
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(i);
        }
    }
    // Rounding left `u` past the last partial sum.
    Ok(probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1))
}

/// Normalize, apply the softmax at `temperature`, then draw an index.
pub(crate) fn sample_by_reduction<R: Rng + ?Sized>(reductions: &[f64], temperature: f64, rng: &mut R) -> usize {
    let probs = softmax_temp(&normalize(reductions), temperature);
    sample_categorical(&probs, rng).expect("softmax output is a distribution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize(&[5.0, 5.0, 5.0]), vec![0.0; 3]);
        assert_eq!(normalize(&[-1.0, 0.0, 3.0]), vec![0.0, 0.25, 1.0]);
        assert_eq!(normalize(&[7.0]), vec![0.0]);
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax_temp(&[0.0, 0.0], 3.0), vec![0.5, 0.5]);
        let e5 = 5f64.exp();
        let p = softmax_temp(&[1.0, 0.0], 5.0);
        assert!((p[0] - e5 / (e5 + 1.0)).abs() < 1e-15);
        assert!((p[1] - 1.0 / (e5 + 1.0)).abs() < 1e-15);
        assert!((p[0] - 0.993307).abs() < 1e-6 && (p[1] - 0.006693).abs() < 1e-6);
        for q in softmax_temp(&[0.0; 3], 5.0) {
            assert!((q - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_distribution() {
        let mut rng = stream_rng(0, 0);
        for _ in 0..1000 {
            assert_eq!(sample_categorical(&[1.0, 0.0, 0.0], &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn malformed_distributions() {
        let mut rng = stream_rng(0, 0);
        assert!(sample_categorical(&[], &mut rng).is_err());
        assert!(sample_categorical(&[0.5, 0.4], &mut rng).is_err());
        assert!(sample_categorical(&[1.5, -0.5], &mut rng).is_err());
        assert!(sample_categorical(&[f64::NAN, 1.0], &mut rng).is_err());
    }

    fn frequency(probs: &[f64], index: usize, draws: usize, seed: u64) -> f64 {
        let mut rng = stream_rng(seed, 0);
        let hits = (0..draws)
            .filter(|_| sample_categorical(probs, &mut rng).unwrap() == index)
            .count();
        hits as f64 / draws as f64
    }

    #[test]
    fn fair_coin_frequency() {
        let f = frequency(&[0.5, 0.5], 0, 100_000, 4);
        assert!((f - 0.5).abs() <= 0.01, "{f}");
    }

    #[test]
    fn softmax_example_frequency() {
        let probs = softmax_temp(&[1.0, 0.0], 5.0);
        let f = frequency(&probs, 1, 100_000, 5);
        assert!((f - 0.0067).abs() <= 0.002, "{f}");
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one(v in prop::collection::vec(0.0f64..=1.0, 1..40), b in 0.0f64..50.0) {
            let p = softmax_temp(&v, b);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|&x| x > 0.0));
        }

        #[test]
        fn softmax_lower_bound(v in prop::collection::vec(0.0f64..=1.0, 1..40), b in 0.0f64..20.0) {
            let d = v.len() as f64;
            let bound = 1.0 / (1.0 + (d - 1.0) * b.exp());
            for p in softmax_temp(&v, b) {
                prop_assert!(p >= bound * (1.0 - 1e-12));
            }
        }

        #[test]
        fn normalize_range_and_affine_invariance(
            v in prop::collection::vec(-1e3f64..1e3, 1..30),
            a in 0.01f64..100.0,
            b in -100.0f64..100.0,
        ) {
            let n = normalize(&v);
            prop_assert!(n.iter().all(|&x| (0.0..=1.0).contains(&x)));
            let shifted: Vec<f64> = v.iter().map(|x| a * x + b).collect();
            for (x, y) in n.iter().zip(normalize(&shifted)) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }
}
