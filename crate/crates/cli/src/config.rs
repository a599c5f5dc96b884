//! TOML run configuration. Every key mirrors the command-line flag of the
//! same name; flags win over file values.
//!
//! ```toml
//! [data]
//! path = "data/uci/vertebral.csv"
//! label = "last"
//! header = true
//! task = "classification"
//! log-label = false
//!
//! [forest]
//! variant = "DMRF"
//! trees = 100
//! kn = 5
//! strict-leaf = false
//!
//! [eval]
//! folds = 10
//! repeats = 10
//! grid = ["p=0.05:0.95:0.1"]
//!
//! [consistency]
//! schedule = [256, 1024, 4096, 8192]
//! kn-rule = "pow:0.6"
//! seeds = [1, 2, 3, 4, 5]
//! test-size = 10000
//!
//! [run]
//! seed = 0
//! jobs = 0
//! out = "results.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub data: DataSection,
    pub forest: ForestSection,
    pub eval: EvalSection,
    pub consistency: ConsistencySection,
    pub bench: BenchSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub synthetic: Option<String>,
    pub label: Option<String>,
    pub header: Option<bool>,
    pub task: Option<String>,
    pub log_label: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ForestSection {
    pub variant: Option<String>,
    pub trees: Option<usize>,
    pub q: Option<f64>,
    pub p: Option<f64>,
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub lambda: Option<f64>,
    pub m: Option<usize>,
    pub kn: Option<usize>,
    pub ratio: Option<f64>,
    pub strict_leaf: Option<bool>,
    pub weighted_mse: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EvalSection {
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub grid: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConsistencySection {
    pub synthetic: Option<String>,
    pub schedule: Option<Vec<usize>>,
    pub kn_rule: Option<String>,
    pub seeds: Option<Vec<u64>>,
    pub test_size: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BenchSection {
    pub synthetic: Option<String>,
    pub sizes: Option<Vec<usize>>,
    pub variants: Option<Vec<String>>,
    pub dim: Option<usize>,
    pub reps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunSection {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(FileConfig::default()), Self::load)
    }
}
