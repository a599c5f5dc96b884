use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dmrf", version, about = "Train and evaluate data-driven multinomial random forests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a forest and write it to a model file.
    Train(TrainArgs),
    /// Predict one label or value per input row.
    Predict(PredictArgs),
    /// Repeated k-fold cross-validation.
    Cv(CvArgs),
    /// Cross-validation over a parameter grid.
    Sweep(SweepArgs),
    /// Test risk on growing synthetic samples.
    Consistency(ConsistencyArgs),
    /// Training time across sizes and variants.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// CSV file with one label column.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Generated data, e.g. `threshold:dim=2,noise=0.1,n=1000,seed=3`.
    #[arg(long, conflicts_with = "data")]
    pub synthetic: Option<String>,
    /// Label column: `last`, a 0-based index or a header name.
    #[arg(long)]
    pub label: Option<String>,
    /// The CSV has no header row.
    #[arg(long)]
    pub no_header: bool,
    /// `classification` or `regression`.
    #[arg(long)]
    pub task: Option<String>,
    /// Replace regression labels by their natural logarithm.
    #[arg(long)]
    pub log_label: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ForestArgs {
    /// DMRF, BreimanRF, BRF-SE, BRF-b, MRF-SE, MRF-b, Denil14-SE or Denil14-b.
    #[arg(long)]
    pub variant: Option<String>,
    /// Number of trees.
    #[arg(long)]
    pub trees: Option<usize>,
    /// Bootstrap inclusion probability.
    #[arg(long)]
    pub q: Option<f64>,
    /// Probability of taking the best split.
    #[arg(long)]
    pub p: Option<f64>,
    /// Feature temperature.
    #[arg(long)]
    pub b1: Option<f64>,
    /// Threshold temperature.
    #[arg(long)]
    pub b2: Option<f64>,
    /// BRF single-feature probability.
    #[arg(long)]
    pub p1: Option<f64>,
    /// BRF random-threshold probability.
    #[arg(long)]
    pub p2: Option<f64>,
    /// Denil14 Poisson mean.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Denil14 preselected points per node.
    #[arg(long)]
    pub m: Option<usize>,
    /// Minimum node size for splitting.
    #[arg(long)]
    pub kn: Option<usize>,
    /// Structure share in SE variants.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Reject splits that leave a child below the minimum node size.
    #[arg(long)]
    pub strict_leaf: bool,
    /// Weight child MSE terms by child size.
    #[arg(long)]
    pub weighted_mse: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with `[data]`, `[forest]`, `[eval]` and `[run]` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 uses every core).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// CSV with the model's feature columns, optionally with its label column.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub no_header: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Grid axis `name=v1,v2` or `name=start:stop:step`; repeat for a
    /// Cartesian product.
    #[arg(long)]
    pub grid: Vec<String>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    /// Generated distribution, e.g. `threshold:dim=2,noise=0.1`.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Strictly increasing training sizes, comma separated.
    #[arg(long)]
    pub schedule: Option<String>,
    /// `pow:<alpha>` or `const:<k>`.
    #[arg(long)]
    pub kn_rule: Option<String>,
    /// Training seeds, comma separated.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub test_size: Option<usize>,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Generated family; `n` is taken from `--sizes`.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// At least two training sizes, comma separated.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Variants to time, comma separated.
    #[arg(long)]
    pub variants: Option<String>,
    /// Feature count of the generated family.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Timing repetitions; the fastest is reported.
    #[arg(long)]
    pub reps: Option<usize>,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub run: RunArgs,
}
