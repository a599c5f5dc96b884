//! Plain-text model files.
//!
//! ```text
//! dmrf-model 1
//! task classification
//! label <name>
//! label-column <index>
//! classes <c>
//! class <name>                      (c lines)
//! features <D>
//! feature numeric <name>
//! feature categorical <levels> <name>
//! level <name>                      (one per level)
//! config <key>=<value>              (every VariantConfig field)
//! trees <M>
//! tree <i> <nodes>
//! S <feature> <threshold> <left> <right> <count>
//! L c <label> <count> <vote_1> ... <vote_c>
//! L r <mean> <count>
//! end
//! ```
//!
//! Names are escaped (`\\`, `\n`, `\r`) and run to the end of the line.
//! Floats use Rust's shortest round-trip formatting, so a decoded model
//! predicts exactly like the encoded one.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::data::{FeatureKind, Schema, Task};
use crate::error::{Error, Result};
use crate::forest::{Forest, Variant, VariantConfig};
use crate::split::SplitPoint;
use crate::tree::{LeafPayload, Tree, TreeNode};

const MAGIC: &str = "dmrf-model 1";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

/// Serializes a forest to the text format.
pub fn encode_model(forest: &Forest) -> String {
    let schema = forest.schema();
    let cfg = forest.config();
    let mut s = String::new();
    // Writing to a String cannot fail.
    let _ = (|| -> std::fmt::Result {
        writeln!(s, "{MAGIC}")?;
        writeln!(s, "task {}", schema.task.name())?;
        writeln!(s, "label {}", escape(&schema.label_name))?;
        writeln!(s, "label-column {}", schema.label_column)?;
        writeln!(s, "classes {}", schema.class_names.len())?;
        for name in &schema.class_names {
            writeln!(s, "class {}", escape(name))?;
        }
        writeln!(s, "features {}", schema.n_features())?;
        for (name, kind) in schema.feature_names.iter().zip(&schema.feature_kinds) {
            match kind {
                FeatureKind::Numeric => writeln!(s, "feature numeric {}", escape(name))?,
                FeatureKind::Categorical(levels) => {
                    writeln!(s, "feature categorical {} {}", levels.len(), escape(name))?;
                    for level in levels {
                        writeln!(s, "level {}", escape(level))?;
                    }
                }
            }
        }
        for (key, value) in config_pairs(cfg) {
            writeln!(s, "config {key}={value}")?;
        }
        writeln!(s, "trees {}", forest.trees().len())?;
        for (i, tree) in forest.trees().iter().enumerate() {
            writeln!(s, "tree {i} {}", tree.nodes().len())?;
            for node in tree.nodes() {
                match node {
                    TreeNode::Split { split, left, right, count } => {
                        writeln!(s, "S {} {} {left} {right} {count}", split.feature, split.threshold)?
                    }
                    TreeNode::Leaf(LeafPayload::Class { votes, label, count }) => {
                        write!(s, "L c {label} {count}")?;
                        for v in votes {
                            write!(s, " {v}")?;
                        }
                        writeln!(s)?;
                    }
                    TreeNode::Leaf(LeafPayload::Value { mean, count }) => writeln!(s, "L r {mean} {count}")?,
                }
            }
        }
        writeln!(s, "end")
    })();
    s
}

fn config_pairs(c: &VariantConfig) -> Vec<(&'static str, String)> {
    vec![
        ("variant", c.variant.name().to_string()),
        ("trees", c.trees.to_string()),
        ("q", c.q.to_string()),
        ("kn", c.k_n.to_string()),
        ("p", c.p.to_string()),
        ("b1", c.b1.to_string()),
        ("b2", c.b2.to_string()),
        ("p1", c.p1.to_string()),
        ("p2", c.p2.to_string()),
        ("lambda", c.lambda.to_string()),
        ("m", c.m.to_string()),
        ("ratio", c.ratio.to_string()),
        ("strict-leaf", c.strict_leaf.to_string()),
        ("weighted-mse", c.weighted_mse.to_string()),
        ("seed", c.seed.to_string()),
    ]
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.split('\n').enumerate(),
            line: 0,
        }
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::ModelFormat {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    /// Next line, which must start with `key `; returns the rest.
    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next()?;
        l.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key} ...`")))
    }

    fn name(&mut self, key: &str) -> Result<String> {
        let raw = self.keyed(key)?;
        unescape(raw).ok_or_else(|| self.err("bad escape sequence"))
    }

    fn parse<T: FromStr>(&self, token: &str, what: &str) -> Result<T> {
        token
            .parse()
            .map_err(|_| self.err(format!("cannot parse {what} `{token}`")))
    }

    fn count(&mut self, key: &str, limit: usize) -> Result<usize> {
        let raw = self.keyed(key)?;
        let n: usize = self.parse(raw, key)?;
        // Guards allocations driven by the header against the body size.
        if n > limit {
            return Err(self.err(format!("{key} count {n} exceeds the file size")));
        }
        Ok(n)
    }
}

/// Parses the text format back into a forest.
pub fn decode_model(text: &str) -> Result<Forest> {
    let limit = text.len();
    let mut lines = Lines::new(text);
    if lines.next()? != MAGIC {
        return Err(lines.err(format!("expected `{MAGIC}`")));
    }
    let task_raw = lines.keyed("task")?;
    let task: Task = lines.parse(task_raw, "task")?;
    let label_name = lines.name("label")?;
    let label_raw = lines.keyed("label-column")?;
    let label_column = lines.parse(label_raw, "label column")?;

    let n_classes = lines.count("classes", limit)?;
    let mut class_names = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        class_names.push(lines.name("class")?);
    }
    if (task == Task::Classification) != (n_classes > 0) {
        return Err(lines.err("class list does not match the task"));
    }

    let n_features = lines.count("features", limit)?;
    if n_features == 0 {
        return Err(lines.err("model has no features"));
    }
    let mut feature_names = Vec::with_capacity(n_features);
    let mut feature_kinds = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        let rest = lines.keyed("feature")?;
        let (kind, name) = if let Some(name) = rest.strip_prefix("numeric ") {
            (FeatureKind::Numeric, name)
        } else if let Some(rest) = rest.strip_prefix("categorical ") {
            let (n, name) = rest.split_once(' ').ok_or_else(|| lines.err("missing feature name"))?;
            let n: usize = lines.parse(n, "level count")?;
            if n > limit {
                return Err(lines.err("level count exceeds the file size"));
            }
            let mut levels = Vec::with_capacity(n);
            for _ in 0..n {
                levels.push(lines.name("level")?);
            }
            (FeatureKind::Categorical(levels), name)
        } else {
            return Err(lines.err("unknown feature kind"));
        };
        feature_names.push(unescape(name).ok_or_else(|| lines.err("bad escape sequence"))?);
        feature_kinds.push(kind);
    }
    let schema = Schema {
        feature_names,
        feature_kinds,
        label_name,
        label_column,
        task,
        class_names,
    };

    let config = parse_config(&mut lines)?;
    let n_trees = lines.count("trees", limit)?;
    let mut trees = Vec::with_capacity(n_trees);
    for i in 0..n_trees {
        let rest = lines.keyed("tree")?;
        let (idx, n_nodes) = rest.split_once(' ').ok_or_else(|| lines.err("expected `tree <i> <nodes>`"))?;
        if lines.parse::<usize>(idx, "tree index")? != i {
            return Err(lines.err(format!("expected tree {i}")));
        }
        let n_nodes: usize = lines.parse(n_nodes, "node count")?;
        if n_nodes > limit {
            return Err(lines.err("node count exceeds the file size"));
        }
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let l = lines.next()?;
            nodes.push(parse_node(&lines, l, n_classes)?);
        }
        let start = lines.line;
        trees.push(Tree::from_nodes(n_features, nodes).map_err(|e| Error::ModelFormat {
            line: start,
            reason: e.to_string(),
        })?);
    }
    if lines.next()? != "end" {
        return Err(lines.err("expected `end`"));
    }
    match lines.next() {
        Err(_) => {}
        Ok("") if lines.inner.next().is_none() => {}
        Ok(_) => return Err(lines.err("trailing content after `end`")),
    }
    let line = lines.line;
    Forest::from_parts(trees, schema, config).map_err(|e| Error::ModelFormat {
        line,
        reason: e.to_string(),
    })
}

fn parse_config(lines: &mut Lines<'_>) -> Result<VariantConfig> {
    let mut pairs = Vec::new();
    for key in [
        "variant",
        "trees",
        "q",
        "kn",
        "p",
        "b1",
        "b2",
        "p1",
        "p2",
        "lambda",
        "m",
        "ratio",
        "strict-leaf",
        "weighted-mse",
        "seed",
    ] {
        let rest = lines.keyed("config")?;
        let value = rest
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| lines.err(format!("expected `config {key}=...`")))?;
        pairs.push(value);
    }
    let variant: Variant = lines.parse(pairs[0], "variant")?;
    let mut c = VariantConfig::new(variant);
    c.trees = lines.parse(pairs[1], "trees")?;
    c.q = lines.parse(pairs[2], "q")?;
    c.k_n = lines.parse(pairs[3], "kn")?;
    c.p = lines.parse(pairs[4], "p")?;
    c.b1 = lines.parse(pairs[5], "b1")?;
    c.b2 = lines.parse(pairs[6], "b2")?;
    c.p1 = lines.parse(pairs[7], "p1")?;
    c.p2 = lines.parse(pairs[8], "p2")?;
    c.lambda = lines.parse(pairs[9], "lambda")?;
    c.m = lines.parse(pairs[10], "m")?;
    c.ratio = lines.parse(pairs[11], "ratio")?;
    c.strict_leaf = lines.parse(pairs[12], "strict-leaf")?;
    c.weighted_mse = lines.parse(pairs[13], "weighted-mse")?;
    c.seed = lines.parse(pairs[14], "seed")?;
    c.validate().map_err(|e| lines.err(e.to_string()))?;
    Ok(c)
}

fn parse_node(lines: &Lines<'_>, l: &str, n_classes: usize) -> Result<TreeNode> {
    let tokens: Vec<&str> = l.split(' ').collect();
    match tokens.as_slice() {
        ["S", feature, threshold, left, right, count] => Ok(TreeNode::Split {
            split: SplitPoint {
                feature: lines.parse(feature, "feature")?,
                threshold: lines.parse(threshold, "threshold")?,
            },
            left: lines.parse(left, "child")?,
            right: lines.parse(right, "child")?,
            count: lines.parse(count, "count")?,
        }),
        ["L", "c", label, count, votes @ ..] => {
            if votes.len() != n_classes {
                return Err(lines.err(format!("expected {n_classes} votes, found {}", votes.len())));
            }
            let votes = votes
                .iter()
                .map(|v| lines.parse::<f64>(v, "vote"))
                .collect::<Result<Vec<_>>>()?;
            Ok(TreeNode::Leaf(LeafPayload::Class {
                votes,
                label: lines.parse(label, "label")?,
                count: lines.parse(count, "count")?,
            }))
        }
        ["L", "r", mean, count] => Ok(TreeNode::Leaf(LeafPayload::Value {
            mean: lines.parse(mean, "mean")?,
            count: lines.parse(count, "count")?,
        })),
        _ => Err(lines.err("malformed node")),
    }
}

pub fn save_model(forest: &Forest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(encode_model(forest).as_bytes()).map_err(io)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Forest> {
    let path = path.as_ref();
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    decode_model(&text)
}
