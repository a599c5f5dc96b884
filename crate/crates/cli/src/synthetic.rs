//! `--synthetic` strings: `<family>[:key=value,...]` with keys `dim`,
//! `noise`, `n` and `seed`.

use dmrf::data::{SyntheticKind, SyntheticSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticArg {
    pub spec: SyntheticSpec,
    pub n: Option<usize>,
}

impl SyntheticArg {
    pub const DEFAULT_N: usize = 1000;

    pub fn n_or_default(&self) -> usize {
        self.n.unwrap_or(Self::DEFAULT_N)
    }
}

fn family(name: &str) -> Option<SyntheticKind> {
    match name.to_ascii_lowercase().as_str() {
        "threshold" | "noisy-threshold" | "classification" => Some(SyntheticKind::NoisyThreshold),
        "smooth" | "smooth-regression" | "regression" => Some(SyntheticKind::SmoothRegression),
        _ => None,
    }
}

pub fn parse_synthetic(s: &str) -> Result<SyntheticArg, CliError> {
    let bad = |why: String| CliError::config(format!("invalid parameter `synthetic`: {why}"));
    let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
    let kind = family(name).ok_or_else(|| bad(format!("unknown family `{name}`")))?;
    let mut spec = SyntheticSpec {
        kind,
        dim: 2,
        noise: match kind {
            SyntheticKind::NoisyThreshold => 0.1,
            SyntheticKind::SmoothRegression => 0.01,
        },
        seed: 0,
    };
    let mut n = None;
    for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{pair}`")))?;
        let number = |what: &str| bad(format!("`{key}` needs {what}, got `{value}`"));
        match key.trim() {
            "dim" => spec.dim = value.trim().parse().map_err(|_| number("an integer"))?,
            "noise" => spec.noise = value.trim().parse().map_err(|_| number("a number"))?,
            "n" => n = Some(value.trim().parse().map_err(|_| number("an integer"))?),
            "seed" => spec.seed = value.trim().parse().map_err(|_| number("an integer"))?,
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    spec.validate()?;
    if n == Some(0) {
        return Err(bad("`n` must be positive".into()));
    }
    Ok(SyntheticArg { spec, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_form() {
        let a = parse_synthetic("threshold:dim=3,noise=0.2,n=500,seed=9").unwrap();
        assert_eq!(a.spec.kind, SyntheticKind::NoisyThreshold);
        assert_eq!((a.spec.dim, a.spec.noise, a.spec.seed, a.n), (3, 0.2, 9, Some(500)));
    }

    #[test]
    fn defaults() {
        let a = parse_synthetic("regression").unwrap();
        assert_eq!(a.spec.kind, SyntheticKind::SmoothRegression);
        assert_eq!((a.spec.dim, a.spec.noise, a.n_or_default()), (2, 0.01, 1000));
    }

    #[test]
    fn rejects() {
        for s in ["", "circle", "threshold:dim", "threshold:dim=x", "threshold:colour=1", "threshold:n=0", "threshold:noise=0.7"] {
            let e = parse_synthetic(s).unwrap_err();
            assert_eq!(e.code(), 3, "{s}");
        }
    }
}
