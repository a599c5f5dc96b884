//! Delimited-text ingestion.
//!
//! Rules applied to every source file:
//! - empty, `?`, `NA`, `N/A`, `null` and non-finite cells are missing and
//!   become `-1.0`;
//! - a feature column holding any other non-numeric token is categorical and
//!   is ordinal-encoded by first appearance (missing cells stay `-1.0`);
//! - class labels are re-encoded to contiguous codes by first appearance;
//! - regression labels may be replaced by their natural logarithm.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, FeatureKind, Schema, Targets, Task, MISSING};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, a 0-based index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label: LabelColumn,
    pub has_header: bool,
    /// Replace each regression label `y` by `ln(y)`.
    pub log_label: bool,
    pub task: Task,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label: LabelColumn::Last,
            has_header: true,
            log_label: false,
            task: Task::Classification,
        }
    }
}

enum Cell {
    Missing,
    Number(f64),
    Token,
}

fn classify(raw: &str) -> Cell {
    let s = raw.trim();
    if matches!(s, "" | "?" | "NA" | "N/A" | "na" | "null" | "NULL") {
        return Cell::Missing;
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Cell::Number(v),
        Ok(_) => Cell::Missing,
        Err(_) => Cell::Token,
    }
}

fn reader_builder(has_header: bool) -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(None);
    b
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, opts)
}

/// Parses a labelled dataset from any reader.
pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<Dataset> {
    if opts.log_label && opts.task != Task::Regression {
        return Err(Error::param(
            "log-label",
            "log transform applies to regression labels only",
        ));
    }
    let mut rdr = reader_builder(opts.has_header).from_reader(reader);
    let header: Option<Vec<String>> = if opts.has_header {
        Some(rdr.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };
    let records: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;

    let width = match (&header, records.first()) {
        (Some(h), _) => h.len(),
        (None, Some(r)) => r.len(),
        (None, None) => return Err(Error::EmptyDataset),
    };
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let label_col = match &opts.label {
        LabelColumn::Last => width.checked_sub(1),
        LabelColumn::Index(i) => Some(*i).filter(|&i| i < width),
        LabelColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name)),
    }
    .ok_or_else(|| Error::MissingLabelColumn(format!("{:?}", opts.label)))?;
    if width < 2 {
        return Err(Error::param("features", "file has no feature columns"));
    }
    let first_row = if opts.has_header { 2 } else { 1 };
    for (r, rec) in records.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::BadRow {
                row: r + first_row,
                reason: format!("expected {width} fields, found {}", rec.len()),
            });
        }
    }

    let feature_cols: Vec<usize> = (0..width).filter(|&c| c != label_col).collect();
    let n_features = feature_cols.len();
    let kinds: Vec<FeatureKind> = feature_cols
        .iter()
        .map(|&c| {
            let categorical = records
                .iter()
                .any(|rec| matches!(classify(&rec[c]), Cell::Token));
            if categorical {
                let mut levels: Vec<String> = Vec::new();
                for rec in &records {
                    if let Cell::Token | Cell::Number(_) = classify(&rec[c]) {
                        let t = rec[c].trim();
                        if !levels.iter().any(|l| l == t) {
                            levels.push(t.to_string());
                        }
                    }
                }
                FeatureKind::Categorical(levels)
            } else {
                FeatureKind::Numeric
            }
        })
        .collect();

    let encoders: Vec<Encoder> = kinds.iter().map(Encoder::new).collect();
    let mut features = Vec::with_capacity(records.len() * n_features);
    for rec in &records {
        for (k, &c) in feature_cols.iter().enumerate() {
            features.push(encoders[k].encode(&rec[c]));
        }
    }

    let mut class_names = Vec::new();
    let targets = match opts.task {
        Task::Classification => {
            let mut index: HashMap<String, usize> = HashMap::new();
            let codes = records
                .iter()
                .map(|rec| {
                    let s = rec[label_col].trim();
                    *index.entry(s.to_string()).or_insert_with(|| {
                        class_names.push(s.to_string());
                        class_names.len() - 1
                    })
                })
                .collect();
            Targets::Classes {
                codes,
                n_classes: class_names.len(),
            }
        }
        Task::Regression => {
            let mut values = Vec::with_capacity(records.len());
            for (r, rec) in records.iter().enumerate() {
                let row = r + first_row;
                let v = match classify(&rec[label_col]) {
                    Cell::Number(v) => v,
                    _ => {
                        return Err(Error::BadRow {
                            row,
                            reason: format!("label `{}` is not a number", &rec[label_col]),
                        })
                    }
                };
                if opts.log_label {
                    if v <= 0.0 {
                        return Err(Error::BadRow {
                            row,
                            reason: format!("cannot log-transform non-positive label {v}"),
                        });
                    }
                    values.push(v.ln());
                } else {
                    values.push(v);
                }
            }
            Targets::Values(values)
        }
    };

    let (feature_names, label_name) = match &header {
        Some(h) => (
            feature_cols.iter().map(|&c| h[c].to_string()).collect(),
            h[label_col].to_string(),
        ),
        None => (
            feature_cols.iter().map(|&c| format!("x{c}")).collect(),
            format!("x{label_col}"),
        ),
    };
    let schema = Schema {
        feature_names,
        feature_kinds: kinds,
        label_name,
        label_column: label_col,
        task: opts.task,
        class_names,
    };
    Dataset::from_flat(features, n_features, targets, schema)
}

enum Encoder {
    Numeric,
    Levels(HashMap<String, f64>),
}

impl Encoder {
    fn new(kind: &FeatureKind) -> Self {
        match kind {
            FeatureKind::Numeric => Encoder::Numeric,
            FeatureKind::Categorical(levels) => Encoder::Levels(
                levels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.clone(), i as f64))
                    .collect(),
            ),
        }
    }

    fn encode(&self, raw: &str) -> f64 {
        match (self, classify(raw)) {
            (_, Cell::Missing) => MISSING,
            (Encoder::Numeric, Cell::Number(v)) => v,
            (Encoder::Numeric, Cell::Token) => MISSING,
            // Unseen levels are treated like missing values.
            (Encoder::Levels(map), _) => map.get(raw.trim()).copied().unwrap_or(MISSING),
        }
    }
}

/// Reads rows to predict on, encoded with a training schema.
///
/// Rows may hold exactly the schema's features, or the features plus the
/// label in its original column (which is dropped). An input without any
/// rows yields an empty list.
pub fn read_feature_rows<R: Read>(reader: R, schema: &Schema, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let d = schema.n_features();
    let mut rdr = reader_builder(has_header).from_reader(reader);
    let encoders: Vec<Encoder> = schema.feature_kinds.iter().map(Encoder::new).collect();
    let first_row = if has_header { 2 } else { 1 };
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cells: Vec<&str> = if rec.len() == d {
            rec.iter().collect()
        } else if rec.len() == d + 1 && schema.label_column <= d {
            rec.iter()
                .enumerate()
                .filter(|&(c, _)| c != schema.label_column)
                .map(|(_, v)| v)
                .collect()
        } else {
            return Err(Error::BadRow {
                row: r + first_row,
                reason: format!("expected {d} feature columns, found {}", rec.len()),
            });
        };
        rows.push(
            cells
                .iter()
                .zip(&encoders)
                .map(|(raw, enc)| enc.encode(raw))
                .collect(),
        );
    }
    Ok(rows)
}

/// Writes the dataset as `features..., label` with a header row. Class labels
/// are written with their original names.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let schema = data.schema();
    let mut header: Vec<&str> = schema.feature_names.iter().map(String::as_str).collect();
    header.push(&schema.label_name);
    w.write_record(&header)?;
    let mut fields: Vec<String> = Vec::with_capacity(data.n_features() + 1);
    for i in 0..data.n_rows() {
        fields.clear();
        fields.extend(data.row(i).iter().map(|v| v.to_string()));
        fields.push(match data.targets() {
            Targets::Classes { codes, .. } => schema
                .class_names
                .get(codes[i])
                .cloned()
                .unwrap_or_else(|| codes[i].to_string()),
            Targets::Values(v) => v[i].to_string(),
        });
        w.write_record(&fields)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}
