use std::fmt;
use std::str::FromStr;

use super::cv::{cross_validate, EvalReport};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::VariantConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    P,
    Q,
    B1,
    B2,
    Trees,
    Kn,
    P1,
    P2,
    Lambda,
    M,
    Ratio,
}

impl SweepParam {
    const ALL: [SweepParam; 11] = [
        SweepParam::P,
        SweepParam::Q,
        SweepParam::B1,
        SweepParam::B2,
        SweepParam::Trees,
        SweepParam::Kn,
        SweepParam::P1,
        SweepParam::P2,
        SweepParam::Lambda,
        SweepParam::M,
        SweepParam::Ratio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::Q => "q",
            SweepParam::B1 => "b1",
            SweepParam::B2 => "b2",
            SweepParam::Trees => "trees",
            SweepParam::Kn => "kn",
            SweepParam::P1 => "p1",
            SweepParam::P2 => "p2",
            SweepParam::Lambda => "lambda",
            SweepParam::M => "m",
            SweepParam::Ratio => "ratio",
        }
    }

    /// Writes `value` into a copy of `cfg`.
    pub fn apply(self, cfg: &VariantConfig, value: f64) -> Result<VariantConfig> {
        let mut c = *cfg;
        let count = || -> Result<usize> {
            if value.fract() != 0.0 || value < 0.0 || !value.is_finite() {
                return Err(Error::param("grid", format!("{} needs whole numbers, got {value}", self.name())));
            }
            Ok(value as usize)
        };
        match self {
            SweepParam::P => c.p = value,
            SweepParam::Q => c.q = value,
            SweepParam::B1 => c.b1 = value,
            SweepParam::B2 => c.b2 = value,
            SweepParam::Trees => c.trees = count()?,
            SweepParam::Kn => c.k_n = count()?,
            SweepParam::P1 => c.p1 = value,
            SweepParam::P2 => c.p2 = value,
            SweepParam::Lambda => c.lambda = value,
            SweepParam::M => c.m = count()?,
            SweepParam::Ratio => c.ratio = value,
        }
        Ok(c)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = match s.as_str() {
            "k_n" | "k-n" => "kn",
            "m_trees" | "ntrees" => "trees",
            other => other,
        };
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("grid", format!("unknown sweep parameter `{s}`")))
    }
}

/// One parameter and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Largest axis accepted from text.
const MAX_AXIS_LEN: usize = 100_000;

fn parse_value(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::param("grid", format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::param("grid", format!("`{s}` is not finite")));
    }
    Ok(v)
}

/// Rounds away accumulated step error, e.g. `0.15000000000000002`.
fn tidy(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r.is_finite() {
        r
    } else {
        v
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    /// `name=v1,v2,...` or `name=start:stop:step` (inclusive of `stop`).
    fn from_str(s: &str) -> Result<Self> {
        let (name, spec) = s
            .split_once('=')
            .ok_or_else(|| Error::param("grid", format!("expected `name=values`, got `{s}`")))?;
        let param: SweepParam = name.parse()?;
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            let [start, stop, step] = parts.as_slice() else {
                return Err(Error::param("grid", format!("range `{spec}` needs start:stop:step")));
            };
            let (start, stop, step) = (parse_value(start)?, parse_value(stop)?, parse_value(step)?);
            if step <= 0.0 || stop < start {
                return Err(Error::param("grid", format!("empty range `{spec}`")));
            }
            let steps = ((stop - start) / step + 1e-9).floor();
            if steps.is_nan() || steps >= MAX_AXIS_LEN as f64 {
                return Err(Error::param("grid", format!("range `{spec}` is too long")));
            }
            (0..=steps as usize).map(|i| tidy(start + i as f64 * step)).collect()
        } else {
            spec.split(',').map(parse_value).collect::<Result<Vec<_>>>()?
        };
        if values.is_empty() || values.len() > MAX_AXIS_LEN {
            return Err(Error::param("grid", format!("axis `{s}` has no usable values")));
        }
        Ok(SweepAxis { param, values })
    }
}

/// Cartesian product of axes; the first axis varies slowest.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub axes: Vec<SweepAxis>,
}

impl SweepGrid {
    pub fn new(axes: Vec<SweepAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::param("grid", "no axes"));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.values.is_empty() {
                return Err(Error::param("grid", format!("axis {} is empty", a.param)));
            }
            if axes[..i].iter().any(|b| b.param == a.param) {
                return Err(Error::param("grid", format!("axis {} given twice", a.param)));
            }
        }
        Ok(SweepGrid { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Vec<(SweepParam, f64)>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |&v| {
                        let mut next = p.clone();
                        next.push((axis.param, v));
                        next
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<(SweepParam, f64)>,
    pub report: EvalReport,
}

impl SweepRow {
    /// `p=0.5;q=0.65`
    pub fn params_label(&self) -> String {
        self.params
            .iter()
            .map(|(p, v)| format!("{p}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// One cross-validation per grid point, all with the same `seed` so grid
/// points see identical folds.
pub fn sweep(
    data: &Dataset,
    base: &VariantConfig,
    grid: &SweepGrid,
    k: usize,
    repeats: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let points = grid.points();
    let configs = points
        .iter()
        .map(|point| point.iter().try_fold(*base, |c, &(p, v)| p.apply(&c, v)))
        .collect::<Result<Vec<_>>>()?;
    for c in &configs {
        c.validate()?;
    }
    points
        .into_iter()
        .zip(configs)
        .map(|(params, cfg)| {
            Ok(SweepRow {
                params,
                report: cross_validate(data, &cfg, k, repeats, seed)?,
            })
        })
        .collect()
}
