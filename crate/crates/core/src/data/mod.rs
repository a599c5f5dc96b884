//! Datasets, index views and the generators used by the experiments.

mod csv_io;
mod folds;
mod synth;

pub use csv_io::{load_csv, read_csv, read_feature_rows, write_csv, CsvOptions, LabelColumn};
pub use folds::{kfold, structure_estimation_split, Fold};
pub use synth::{synth_classification, synth_regression, SyntheticKind, SyntheticSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value stored for any cell that is missing in the source.
pub const MISSING: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classification" | "class" | "c" => Ok(Task::Classification),
            "regression" | "reg" | "r" => Ok(Task::Regression),
            other => Err(Error::param("task", format!("unknown task `{other}`"))),
        }
    }
}

/// How a source column was turned into numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    /// Ordinal codes `0..levels.len()` in order of first appearance.
    Categorical(Vec<String>),
}

/// Everything needed to map a raw CSV row onto the model's feature space and
/// to map predictions back to the original label strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub feature_names: Vec<String>,
    pub feature_kinds: Vec<FeatureKind>,
    pub label_name: String,
    /// Position of the label in the source file.
    pub label_column: usize,
    pub task: Task,
    /// Original label strings; class code `k` is `class_names[k]`.
    pub class_names: Vec<String>,
}

impl Schema {
    fn anonymous(n_features: usize, task: Task, class_names: Vec<String>) -> Self {
        Schema {
            feature_names: (0..n_features).map(|j| format!("x{j}")).collect(),
            feature_kinds: vec![FeatureKind::Numeric; n_features],
            label_name: "y".to_string(),
            label_column: n_features,
            task,
            class_names,
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Class codes in `0..n_classes`.
    Classes { codes: Vec<usize>, n_classes: usize },
    Values(Vec<f64>),
}

/// Immutable numeric feature matrix with its targets.
///
/// Values are stored twice: row-major for routing whole rows down a tree and
/// column-major for the per-feature sweeps of split search.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    columns: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    targets: Targets,
    schema: Schema,
}

impl Dataset {
    /// Builds a classification dataset. Class codes are `0..n_classes`.
    pub fn classification(rows: Vec<Vec<f64>>, codes: Vec<usize>, n_classes: usize) -> Result<Self> {
        let names = (1..=n_classes).map(|k| k.to_string()).collect();
        let n_features = rows.first().map_or(0, Vec::len);
        let schema = Schema::anonymous(n_features, Task::Classification, names);
        Self::from_rows(rows, Targets::Classes { codes, n_classes }, schema)
    }

    pub fn regression(rows: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        let schema = Schema::anonymous(n_features, Task::Regression, Vec::new());
        Self::from_rows(rows, Targets::Values(values), schema)
    }

    pub(crate) fn from_rows(rows: Vec<Vec<f64>>, targets: Targets, schema: Schema) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(Error::EmptyDataset);
        }
        let n_features = rows[0].len();
        let mut features = Vec::with_capacity(n_rows * n_features);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::BadRow {
                    row: i + 1,
                    reason: format!("expected {n_features} values, found {}", row.len()),
                });
            }
            features.extend(row);
        }
        Self::from_flat(features, n_features, targets, schema)
    }

    pub(crate) fn from_flat(
        features: Vec<f64>,
        n_features: usize,
        targets: Targets,
        schema: Schema,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::param("features", "dataset needs at least one feature"));
        }
        let n_rows = features.len() / n_features;
        if n_rows == 0 {
            return Err(Error::EmptyDataset);
        }
        let n_targets = match &targets {
            Targets::Classes { codes, n_classes } => {
                if let Some(bad) = codes.iter().position(|&c| c >= *n_classes) {
                    return Err(Error::BadRow {
                        row: bad + 1,
                        reason: format!("class code {} outside 0..{n_classes}", codes[bad]),
                    });
                }
                codes.len()
            }
            Targets::Values(v) => v.len(),
        };
        if n_targets != n_rows {
            return Err(Error::param(
                "labels",
                format!("{n_targets} labels for {n_rows} rows"),
            ));
        }
        let mut columns = vec![0.0; features.len()];
        for (k, &v) in features.iter().enumerate() {
            columns[(k % n_features) * n_rows + k / n_features] = v;
        }
        Ok(Dataset {
            features,
            columns,
            n_rows,
            n_features,
            targets,
            schema,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn task(&self) -> Task {
        match self.targets {
            Targets::Classes { .. } => Task::Classification,
            Targets::Values(_) => Task::Regression,
        }
    }

    /// Number of classes, or 0 for regression.
    pub fn n_classes(&self) -> usize {
        match self.targets {
            Targets::Classes { n_classes, .. } => n_classes,
            Targets::Values(_) => 0,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.columns[j * self.n_rows + i]
    }

    /// Class code of row `i`. Panics on regression data.
    #[inline]
    pub fn class(&self, i: usize) -> usize {
        match &self.targets {
            Targets::Classes { codes, .. } => codes[i],
            Targets::Values(_) => panic!("class() called on a regression dataset"),
        }
    }

    /// Target of row `i` as a real number (class code for classification).
    #[inline]
    pub fn target(&self, i: usize) -> f64 {
        match &self.targets {
            Targets::Classes { codes, .. } => codes[i] as f64,
            Targets::Values(v) => v[i],
        }
    }
}

/// A nonempty selection of rows of one dataset.
#[derive(Debug, Clone, Copy)]
pub struct IndexView<'a> {
    data: &'a Dataset,
    indices: &'a [usize],
}

impl<'a> IndexView<'a> {
    pub fn new(data: &'a Dataset, indices: &'a [usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= data.n_rows()) {
            return Err(Error::param(
                "indices",
                format!("row {bad} outside 0..{}", data.n_rows()),
            ));
        }
        Ok(IndexView { data, indices })
    }

    pub(crate) fn new_unchecked(data: &'a Dataset, indices: &'a [usize]) -> Self {
        debug_assert!(!indices.is_empty());
        IndexView { data, indices }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn indices(&self) -> &'a [usize] {
        self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_rejected() {
        let err = Dataset::regression(vec![vec![1.0, 2.0], vec![3.0]], vec![0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::BadRow { row: 2, .. }));
    }

    #[test]
    fn class_codes_must_be_below_class_count() {
        assert!(Dataset::classification(vec![vec![0.0]], vec![2], 2).is_err());
    }

    #[test]
    fn empty_and_featureless_rejected() {
        assert!(matches!(
            Dataset::regression(vec![], vec![]),
            Err(Error::EmptyDataset)
        ));
        assert!(Dataset::regression(vec![vec![]], vec![1.0]).is_err());
    }

    #[test]
    fn index_view_validates() {
        let d = Dataset::regression(vec![vec![1.0], vec![2.0]], vec![0.0, 1.0]).unwrap();
        assert!(IndexView::new(&d, &[]).is_err());
        assert!(IndexView::new(&d, &[0, 2]).is_err());
        assert_eq!(IndexView::new(&d, &[1]).unwrap().len(), 1);
    }
}
