//! Flat result rows and their CSV / JSON-lines writers.

use std::io::{self, Write};

use serde::Serialize;

use super::cv::EvalReport;

/// One fold of one evaluation. Column order is part of the output format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub variant: String,
    /// `name=value` pairs joined by `;`.
    pub params: String,
    pub fold: usize,
    pub repeat: usize,
    pub metric: f64,
    pub seconds: f64,
}

/// Aggregate of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub variant: String,
    pub params: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub fold_std: f64,
    /// Negative mean squared error; empty for classification.
    pub nmse: Option<f64>,
    pub seconds: f64,
}

impl Record {
    pub fn from_report(report: &EvalReport, params: &str) -> Vec<Record> {
        report
            .folds
            .iter()
            .map(|f| Record {
                variant: report.config.variant.name().to_string(),
                params: params.to_string(),
                fold: f.fold,
                repeat: f.repeat,
                metric: f.metric,
                seconds: f.seconds,
            })
            .collect()
    }
}

impl SummaryRow {
    pub fn from_report(report: &EvalReport, params: &str) -> SummaryRow {
        SummaryRow {
            variant: report.config.variant.name().to_string(),
            params: params.to_string(),
            metric: report.metric_name().to_string(),
            mean: report.mean,
            std: report.std,
            fold_std: report.fold_std,
            nmse: report.nmse(),
            seconds: report.total_seconds(),
        }
    }
}

/// Header plus one CSV line per row.
pub fn write_csv_rows<T: Serialize, W: Write>(rows: &[T], writer: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// One JSON object per line.
pub fn write_jsonl_rows<T: Serialize, W: Write>(rows: &[T], mut writer: W) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut writer, row)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> Record {
        Record {
            variant: "DMRF".into(),
            params: "p=0.5;q=0.65".into(),
            fold: 2,
            repeat: 1,
            metric: 0.75,
            seconds: 0.5,
        }
    }

    #[test]
    fn csv_columns() {
        let mut out = Vec::new();
        write_csv_rows(&[record()], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "variant,params,fold,repeat,metric,seconds\nDMRF,p=0.5;q=0.65,2,1,0.75,0.5\n"
        );
    }

    #[test]
    fn jsonl_lines() {
        let mut out = Vec::new();
        write_jsonl_rows(&[record(), record()], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(v["variant"], "DMRF");
        assert_eq!(v["fold"], 2);
    }

    #[test]
    fn empty_nmse_column() {
        let row = SummaryRow {
            variant: "DMRF".into(),
            params: String::new(),
            metric: "accuracy".into(),
            mean: 0.9,
            std: 0.01,
            fold_std: 0.02,
            nmse: None,
            seconds: 1.0,
        };
        let mut out = Vec::new();
        write_csv_rows(&[row], &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().ends_with("0.9,0.01,0.02,,1.0\n"));
    }
}
