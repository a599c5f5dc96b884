//! Cross-validation, parameter sweeps, consistency curves and timing.

mod bench;
mod consistency;
mod cv;
mod records;
mod sweep;

pub use bench::{bench_runtime, BenchReport, BenchRow, ScalingRatio};
pub use consistency::{consistency_curve, ConsistencyPoint, KnRule};
pub use cv::{cross_validate, evaluate, EvalReport, FoldResult};
pub use records::{write_csv_rows, write_jsonl_rows, Record, SummaryRow};
pub use sweep::{sweep, SweepAxis, SweepGrid, SweepParam, SweepRow};

/// Fraction of `predicted` equal to `truth`.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / predicted.len() as f64
}

pub fn mean_squared_error(predicted: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    predicted.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / predicted.len() as f64
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); 0 for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}
