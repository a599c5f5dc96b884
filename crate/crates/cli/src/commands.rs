use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use dmrf::data::{load_csv, read_feature_rows, CsvOptions, Dataset, LabelColumn, Task};
use dmrf::eval::{
    bench_runtime, consistency_curve, cross_validate, sweep, write_csv_rows, write_jsonl_rows, EvalReport, KnRule,
    Record, SummaryRow, SweepAxis, SweepGrid,
};
use dmrf::forest::{train_forest, Variant, VariantConfig};
use dmrf::model_io::{load_model, save_model};
use dmrf::rng::{stream_rng, streams};
use serde::Serialize;

use crate::args::{
    BenchArgs, ConsistencyArgs, CvArgs, DataArgs, EvalArgs, ForestArgs, PredictArgs, RunArgs, SweepArgs, TrainArgs,
};
use crate::config::{DataSection, EvalSection, FileConfig, ForestSection};
use crate::error::CliError;
use crate::synthetic::{parse_synthetic, SyntheticArg};

type CliResult<T> = Result<T, CliError>;

const DEFAULT_FOLDS: usize = 10;
const DEFAULT_REPEATS: usize = 10;
const DEFAULT_SCHEDULE: [usize; 4] = [256, 1024, 4096, 8192];
const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const DEFAULT_TEST_SIZE: usize = 10_000;

/// Flag and file values resolved for one invocation.
pub(crate) struct Run {
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl Run {
    pub fn resolve(args: &RunArgs, file: &FileConfig) -> Self {
        Run {
            seed: args.seed.or(file.run.seed).unwrap_or(0),
            jobs: args.jobs.or(file.run.jobs).unwrap_or(0),
            out: args.out.clone().or_else(|| file.run.out.clone()),
        }
    }

    fn out(&self) -> CliResult<&Path> {
        self.out.as_deref().ok_or_else(|| CliError::missing("out"))
    }
}

fn forest_config(f: &ForestArgs, file: &ForestSection, seed: u64) -> CliResult<VariantConfig> {
    let variant = match f.variant.as_deref().or(file.variant.as_deref()) {
        Some(name) => Variant::from_str(name)?,
        None => Variant::Dmrf,
    };
    let mut c = VariantConfig::new(variant);
    macro_rules! take {
        ($field:ident, $flag:ident, $key:ident) => {
            if let Some(v) = f.$flag.or(file.$key) {
                c.$field = v;
            }
        };
    }
    take!(trees, trees, trees);
    take!(q, q, q);
    take!(p, p, p);
    take!(b1, b1, b1);
    take!(b2, b2, b2);
    take!(p1, p1, p1);
    take!(p2, p2, p2);
    take!(lambda, lambda, lambda);
    take!(m, m, m);
    take!(k_n, kn, kn);
    take!(ratio, ratio, ratio);
    c.strict_leaf = f.strict_leaf || file.strict_leaf.unwrap_or(false);
    c.weighted_mse = f.weighted_mse || file.weighted_mse.unwrap_or(false);
    c.seed = seed;
    c.validate()?;
    Ok(c)
}

fn load_dataset(d: &DataArgs, file: &DataSection) -> CliResult<Dataset> {
    let task = d
        .task
        .as_deref()
        .or(file.task.as_deref())
        .map(Task::from_str)
        .transpose()?;
    let (path, synthetic) = if d.data.is_some() || d.synthetic.is_some() {
        (d.data.clone(), d.synthetic.clone())
    } else {
        (file.path.clone(), file.synthetic.clone())
    };
    match (path, synthetic) {
        (Some(_), Some(_)) => Err(CliError::config("give either `data` or `synthetic`, not both")),
        (None, None) => Err(CliError::missing("data")),
        (None, Some(s)) => {
            let arg = parse_synthetic(&s)?;
            if let Some(t) = task.filter(|&t| t != arg.spec.task()) {
                return Err(CliError::config(format!(
                    "synthetic family `{s}` is not a {} task",
                    t.name()
                )));
            }
            Ok(arg.spec.generate(arg.n_or_default())?)
        }
        (Some(path), None) => {
            let opts = CsvOptions {
                label: d
                    .label
                    .as_deref()
                    .or(file.label.as_deref())
                    .map_or(LabelColumn::Last, |s| s.parse().unwrap_or_default()),
                has_header: !d.no_header && file.header.unwrap_or(true),
                log_label: d.log_label || file.log_label.unwrap_or(false),
                task: task.unwrap_or(Task::Classification),
            };
            Ok(load_csv(path, &opts)?)
        }
    }
}

fn eval_sizes(e: &EvalArgs, file: &EvalSection) -> (usize, usize) {
    (
        e.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS),
        e.repeats.or(file.repeats).unwrap_or(DEFAULT_REPEATS),
    )
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

/// `results.csv` -> `results.jsonl`, `results.csv` + `folds` -> `results.folds.csv`.
fn sibling(path: &Path, infix: Option<&str>, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match infix {
        Some(i) => format!("{stem}.{i}.{ext}"),
        None => format!("{stem}.{ext}"),
    };
    path.with_file_name(name)
}

/// Writes `rows` as CSV to `path` and as JSON lines next to it.
fn write_rows<T: Serialize>(rows: &[T], path: &Path) -> CliResult<()> {
    let mut w = create(path)?;
    write_csv_rows(rows, &mut w)?;
    w.flush()?;
    let mut w = create(&sibling(path, None, "jsonl"))?;
    write_jsonl_rows(rows, &mut w)?;
    Ok(w.flush()?)
}

fn headline(report: &EvalReport, label: &str, k: usize, repeats: usize) -> String {
    let (mean, std) = match report.task {
        Task::Classification => (100.0 * report.mean, 100.0 * report.std),
        Task::Regression => (report.mean, report.std),
    };
    let unit = if report.task == Task::Classification { " %" } else { "" };
    format!(
        "{label} {}{unit}: {mean:.4} ± {std:.4} ({repeats} x {k}-fold, {:.2}s)",
        report.metric_name(),
        report.total_seconds()
    )
}

pub(crate) fn train(a: &TrainArgs, file: &FileConfig, run: &Run, stdout: &mut dyn Write) -> CliResult<()> {
    let out = run.out()?;
    let cfg = forest_config(&a.forest, &file.forest, run.seed)?;
    let data = load_dataset(&a.data, &file.data)?;
    let start = Instant::now();
    let forest = train_forest(&data, &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    save_model(&forest, out)?;
    writeln!(
        stdout,
        "variant={} trees={} n={} d={} seconds={seconds:.3} model={}",
        cfg.variant.name(),
        cfg.trees,
        data.n_rows(),
        data.n_features(),
        out.display()
    )?;
    Ok(())
}

pub(crate) fn predict(a: &PredictArgs, run: &Run, stdout: &mut dyn Write) -> CliResult<()> {
    let model = a.model.as_deref().ok_or_else(|| CliError::missing("model"))?;
    let input = a.data.as_deref().ok_or_else(|| CliError::missing("data"))?;
    let forest = load_model(model)?;
    let reader = File::open(input).map_err(|e| CliError::data(format!("cannot read {}: {e}", input.display())))?;
    let rows = read_feature_rows(reader, forest.schema(), !a.no_header)?;
    let mut lines = Vec::with_capacity(rows.len());
    let mut rng = stream_rng(run.seed, streams::VOTE_TIES);
    for x in &rows {
        lines.push(match forest.task() {
            Task::Classification => forest.schema().class_names[forest.predict_class(x, &mut rng)?].clone(),
            Task::Regression => forest.predict_value(x)?.to_string(),
        });
    }
    let mut sink: Box<dyn Write + '_> = match &run.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(&mut *stdout),
    };
    if !lines.is_empty() {
        let mut w = csv::Writer::from_writer(&mut sink);
        w.write_record(["prediction"])?;
        for l in &lines {
            w.write_record([l])?;
        }
        w.flush()?;
    }
    Ok(sink.flush()?)
}

pub(crate) fn cv(a: &CvArgs, file: &FileConfig, run: &Run, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = forest_config(&a.forest, &file.forest, run.seed)?;
    let (k, repeats) = eval_sizes(&a.eval, &file.eval);
    let data = load_dataset(&a.data, &file.data)?;
    let report = cross_validate(&data, &cfg, k, repeats, run.seed)?;
    if let Some(out) = &run.out {
        write_rows(&Record::from_report(&report, ""), out)?;
    }
    writeln!(stdout, "{}", headline(&report, cfg.variant.name(), k, repeats))?;
    Ok(())
}

pub(crate) fn sweep_cmd(a: &SweepArgs, file: &FileConfig, run: &Run, stdout: &mut dyn Write) -> CliResult<()> {
    let specs: Vec<String> = if a.grid.is_empty() {
        file.eval.grid.clone().unwrap_or_default()
    } else {
        a.grid.clone()
    };
    if specs.is_empty() {
        return Err(CliError::missing("grid"));
    }
    let axes = specs
        .iter()
        .map(|s| SweepAxis::from_str(s))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = SweepGrid::new(axes)?;
    let cfg = forest_config(&a.forest, &file.forest, run.seed)?;
    let (k, repeats) = eval_sizes(&a.eval, &file.eval);
    let data = load_dataset(&a.data, &file.data)?;
    let rows = sweep(&data, &cfg, &grid, k, repeats, run.seed)?;
    let summary: Vec<SummaryRow> = rows
        .iter()
        .map(|r| SummaryRow::from_report(&r.report, &r.params_label()))
        .collect();
    if let Some(out) = &run.out {
        write_rows(&summary, out)?;
        let folds: Vec<Record> = rows
            .iter()
            .flat_map(|r| Record::from_report(&r.report, &r.params_label()))
            .collect();
        write_rows(&folds, &sibling(out, Some("folds"), "csv"))?;
    }
    for r in &rows {
        writeln!(stdout, "{}", headline(&r.report, &r.params_label(), k, repeats))?;
    }
    if let Some(best) = summary.iter().max_by(|x, y| {
        let key = |s: &SummaryRow| s.nmse.unwrap_or(s.mean);
        key(x).total_cmp(&key(y))
    }) {
        writeln!(stdout, "best: {} mean={} std={}", best.params, best.mean, best.std)?;
    }
    Ok(())
}

fn parse_list<T: FromStr>(s: &str, name: &'static str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::config(format!("invalid parameter `{name}`: cannot parse `{t}`")))
        })
        .collect()
}

#[derive(Serialize)]
struct CurveRow {
    n: usize,
    k_n: usize,
    mean_risk: f64,
    excess_risk: Option<f64>,
    /// Per-seed risks joined by `;`.
    risks: String,
}

pub(crate) fn consistency(a: &ConsistencyArgs, file: &FileConfig, run: &Run, stdout: &mut dyn Write) -> CliResult<()> {
    let c = &file.consistency;
    let synthetic = a
        .synthetic
        .clone()
        .or_else(|| c.synthetic.clone())
        .ok_or_else(|| CliError::missing("synthetic"))?;
    let SyntheticArg { spec, .. } = parse_synthetic(&synthetic)?;
    let schedule = match (&a.schedule, &c.schedule) {
        (Some(s), _) => parse_list(s, "schedule")?,
        (None, Some(v)) => v.clone(),
        (None, None) => DEFAULT_SCHEDULE.to_vec(),
    };
    let seeds = match (&a.seeds, &c.seeds) {
        (Some(s), _) => parse_list(s, "seeds")?,
        (None, Some(v)) => v.clone(),
        (None, None) => DEFAULT_SEEDS.to_vec(),
    };
    let rule = KnRule::from_str(a.kn_rule.as_deref().or(c.kn_rule.as_deref()).unwrap_or("pow:0.6"))?;
    let test_size = a.test_size.or(c.test_size).unwrap_or(DEFAULT_TEST_SIZE);
    let cfg = forest_config(&a.forest, &file.forest, run.seed)?;
    let points = consistency_curve(&spec, &schedule, rule, &cfg, &seeds, test_size)?;
    let rows: Vec<CurveRow> = points
        .iter()
        .map(|p| CurveRow {
            n: p.n,
            k_n: p.k_n,
            mean_risk: p.mean_risk,
            excess_risk: p.excess_risk,
            risks: p.risks.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
        })
        .collect();
    if let Some(out) = &run.out {
        write_rows(&rows, out)?;
    }
    for p in &points {
        let spread = dmrf::eval::sample_std(&p.risks);
        writeln!(stdout, "n={} k_n={} risk: {:.5} ± {spread:.5}", p.n, p.k_n, p.mean_risk)?;
    }
    Ok(())
}

pub(crate) fn bench(a: &BenchArgs, file: &FileConfig, run: &Run, stdout: &mut dyn Write) -> CliResult<()> {
    let b = &file.bench;
    let synthetic = a
        .synthetic
        .clone()
        .or_else(|| b.synthetic.clone())
        .unwrap_or_else(|| "threshold".to_string());
    let SyntheticArg { mut spec, .. } = parse_synthetic(&synthetic)?;
    if let Some(d) = a.dim.or(b.dim) {
        spec.dim = d;
    }
    spec.seed = run.seed;
    let sizes = match (&a.sizes, &b.sizes) {
        (Some(s), _) => parse_list(s, "sizes")?,
        (None, Some(v)) => v.clone(),
        (None, None) => return Err(CliError::missing("sizes")),
    };
    let names: Vec<String> = match (&a.variants, &b.variants) {
        (Some(s), _) => parse_list(s, "variants")?,
        (None, Some(v)) => v.clone(),
        (None, None) => vec![Variant::Dmrf.name().to_string()],
    };
    let base = forest_config(&a.forest, &file.forest, run.seed)?;
    let cfgs = names
        .iter()
        .map(|n| {
            let mut c = base;
            c.variant = Variant::from_str(n)?;
            c.validate()?;
            Ok(c)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let reps = a.reps.or(b.reps).unwrap_or(1);
    let report = bench_runtime(&spec, &sizes, &cfgs, reps)?;
    if let Some(out) = &run.out {
        write_rows(&report.rows, out)?;
    }
    for r in &report.rows {
        writeln!(stdout, "{} n={} d={} trees={} seconds={:.4}", r.variant.name(), r.n, r.dim, r.trees, r.seconds)?;
    }
    for r in &report.ratios {
        writeln!(stdout, "{} time({})/time({}) = {:.3}", r.variant.name(), r.n_to, r.n_from, r.ratio)?;
    }
    Ok(())
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::data(e.to_string())
    }
}
