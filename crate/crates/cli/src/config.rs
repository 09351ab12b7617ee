//! Flat `key=value` experiment configuration with dotted keys.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! rejected. Every key has a default, so an empty file is a valid config.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use besov_ns::{Exponent, GridSpec};

/// A configuration problem, located by its dotted key.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: &str, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    TaylorGreen,
    RandomSeeded,
    Snapshot(PathBuf),
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Init::TaylorGreen => write!(f, "taylor-green"),
            Init::RandomSeeded => write!(f, "random-seeded"),
            Init::Snapshot(p) => write!(f, "bsnap:{}", p.display()),
        }
    }
}

impl FromStr for Init {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "taylor-green" => Ok(Init::TaylorGreen),
            "random-seeded" => Ok(Init::RandomSeeded),
            _ => match s.strip_prefix("bsnap:") {
                Some(p) if !p.is_empty() => Ok(Init::Snapshot(PathBuf::from(p))),
                _ => Err(format!("expected taylor-green, random-seeded or bsnap:<path>, got {s:?}")),
            },
        }
    }
}

/// Where `diagnose` reads its samples from.
#[derive(Clone, Debug, PartialEq)]
pub enum Series {
    /// The synthetic self-similar family on the configured grid.
    Synthetic,
    /// A `simulate` output directory, or a CSV of `t,norm` pairs.
    Path(PathBuf),
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::Synthetic => write!(f, "synthetic"),
            Series::Path(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for Series {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "" => Err("empty series".into()),
            "synthetic" => Ok(Series::Synthetic),
            _ => Ok(Series::Path(PathBuf::from(s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub size: usize,
    pub length: f64,
    pub smoothing: f64,
    pub seed: u64,
    pub count: usize,
    pub inequality_count: usize,
    pub slope: f64,
    pub index_samples: usize,
    pub dt: f64,
    pub t_end: f64,
    pub init: Init,
    pub amplitude: f64,
    pub snapshot_every: usize,
    pub eps: Vec<f64>,
    pub pq: Vec<(Exponent, Exponent)>,
    pub r: f64,
    pub t_blowup: Option<f64>,
    pub series: Series,
    pub samples: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: 3,
            size: 32,
            length: 2.0 * std::f64::consts::PI,
            smoothing: 1.0,
            seed: 20240601,
            count: 20,
            inequality_count: 100,
            slope: 0.0,
            index_samples: 10000,
            dt: 1e-3,
            t_end: 0.1,
            init: Init::TaylorGreen,
            amplitude: 0.5,
            snapshot_every: 10,
            eps: vec![1.5],
            pq: vec![(Exponent::TWO, Exponent::TWO)],
            r: 2.0,
            t_blowup: Some(1.0),
            series: Series::Synthetic,
            samples: 24,
            out: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 21] = [
    "grid.n",
    "grid.N",
    "grid.L",
    "cutoff.smoothing",
    "corpus.seed",
    "corpus.count",
    "corpus.inequality_count",
    "corpus.slope",
    "corpus.index_samples",
    "solver.dt",
    "solver.t_end",
    "solver.init",
    "solver.amplitude",
    "solver.snapshot_every",
    "diagnostics.eps",
    "diagnostics.pq",
    "diagnostics.r",
    "diagnostics.T",
    "diagnostics.series",
    "diagnostics.samples",
    "output.dir",
];

fn number<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("cannot parse {v:?} as a number")))
}

fn list<T>(key: &str, v: &str, item: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    if v.is_empty() {
        return Err(ConfigError::new(key, "empty list"));
    }
    v.split(',').map(|s| item(s.trim())).collect()
}

fn exponent(key: &str, v: &str) -> Result<Exponent, ConfigError> {
    v.parse::<Exponent>().map_err(|e| ConfigError::new(key, e.to_string()))
}

fn pair(key: &str, v: &str) -> Result<(Exponent, Exponent), ConfigError> {
    let (p, q) = v
        .split_once(':')
        .ok_or_else(|| ConfigError::new(key, format!("expected p:q, got {v:?}")))?;
    Ok((exponent(key, p)?, exponent(key, q)?))
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key from its textual value (no range validation).
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let v = v.trim();
        match key {
            "grid.n" => self.dim = number(key, v)?,
            "grid.N" => self.size = number(key, v)?,
            "grid.L" => self.length = number(key, v)?,
            "cutoff.smoothing" => self.smoothing = number(key, v)?,
            "corpus.seed" => self.seed = number(key, v)?,
            "corpus.count" => self.count = number(key, v)?,
            "corpus.inequality_count" => self.inequality_count = number(key, v)?,
            "corpus.slope" => self.slope = number(key, v)?,
            "corpus.index_samples" => self.index_samples = number(key, v)?,
            "solver.dt" => self.dt = number(key, v)?,
            "solver.t_end" => self.t_end = number(key, v)?,
            "solver.init" => self.init = v.parse().map_err(|e: String| ConfigError::new(key, e))?,
            "solver.amplitude" => self.amplitude = number(key, v)?,
            "solver.snapshot_every" => self.snapshot_every = number(key, v)?,
            "diagnostics.eps" => self.eps = list(key, v, |s| number(key, s))?,
            "diagnostics.pq" => self.pq = list(key, v, |s| pair(key, s))?,
            "diagnostics.r" => self.r = number(key, v)?,
            "diagnostics.T" => {
                self.t_blowup = if v == "none" { None } else { Some(number(key, v)?) };
            }
            "diagnostics.series" => self.series = v.parse().map_err(|e: String| ConfigError::new(key, e))?,
            "diagnostics.samples" => self.samples = number(key, v)?,
            "output.dir" => {
                if v.is_empty() {
                    return Err(ConfigError::new(key, "empty path"));
                }
                self.out = PathBuf::from(v);
            }
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "grid.n" => self.dim.to_string(),
            "grid.N" => self.size.to_string(),
            "grid.L" => self.length.to_string(),
            "cutoff.smoothing" => self.smoothing.to_string(),
            "corpus.seed" => self.seed.to_string(),
            "corpus.count" => self.count.to_string(),
            "corpus.inequality_count" => self.inequality_count.to_string(),
            "corpus.slope" => self.slope.to_string(),
            "corpus.index_samples" => self.index_samples.to_string(),
            "solver.dt" => self.dt.to_string(),
            "solver.t_end" => self.t_end.to_string(),
            "solver.init" => self.init.to_string(),
            "solver.amplitude" => self.amplitude.to_string(),
            "solver.snapshot_every" => self.snapshot_every.to_string(),
            "diagnostics.eps" => join(&self.eps, |e| e.to_string()),
            "diagnostics.pq" => join(&self.pq, |(p, q)| format!("{p}:{q}")),
            "diagnostics.r" => self.r.to_string(),
            "diagnostics.T" => self.t_blowup.map_or("none".into(), |t| t.to_string()),
            "diagnostics.series" => self.series.to_string(),
            "diagnostics.samples" => self.samples.to_string(),
            "output.dir" => self.out.display().to_string(),
            _ => return None,
        })
    }

    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(&format!("line {}", i + 1), format!("expected key=value, got {line:?}")))?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// One `key=value` line per key, in a fixed order.
    pub fn serialize(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k}={}\n", self.get(k).expect("known key")))
            .collect()
    }

    pub fn grid(&self) -> Result<GridSpec, ConfigError> {
        GridSpec::new(self.dim, self.size, self.length).map_err(|e| {
            let key = match e {
                besov_ns::Error::UnsupportedDimension(_) => "grid.n",
                besov_ns::Error::NonPowerOfTwo(_) => "grid.N",
                _ => "grid.L",
            };
            ConfigError::new(key, e.to_string())
        })
    }

    /// Checks every range that does not depend on the subcommand.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid()?;
        if self.size < 8 {
            return Err(ConfigError::new("grid.N", format!("need at least 8 points per axis, got {}", self.size)));
        }
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be positive and finite, got {v}")))
            }
        };
        positive("cutoff.smoothing", self.smoothing)?;
        if self.count == 0 {
            return Err(ConfigError::new("corpus.count", "must be at least 1"));
        }
        if self.inequality_count < self.count {
            return Err(ConfigError::new(
                "corpus.inequality_count",
                format!("must be at least corpus.count = {}, got {}", self.count, self.inequality_count),
            ));
        }
        if !(self.slope.is_finite() && self.slope >= 0.0) {
            return Err(ConfigError::new("corpus.slope", format!("must be finite and non-negative, got {}", self.slope)));
        }
        positive("solver.dt", self.dt)?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(ConfigError::new("solver.t_end", format!("must be finite and non-negative, got {}", self.t_end)));
        }
        positive("solver.amplitude", self.amplitude)?;
        for &e in &self.eps {
            if !(1.0..=2.0).contains(&e) {
                return Err(ConfigError::new("diagnostics.eps", format!("eps must lie in [1, 2], got {e}")));
            }
        }
        if !(self.r >= 2.0 && self.r.is_finite()) {
            return Err(ConfigError::new("diagnostics.r", format!("r must be finite and at least 2, got {}", self.r)));
        }
        if let Some(t) = self.t_blowup {
            positive("diagnostics.T", t)?;
        }
        if self.samples < 5 {
            return Err(ConfigError::new("diagnostics.samples", format!("need at least 5 samples for a rate fit, got {}", self.samples)));
        }
        Ok(())
    }

    /// Extra preconditions of the blow-up diagnostics.
    pub fn validate_diagnostics(&self) -> Result<(), ConfigError> {
        self.validate()?;
        if self.dim < 3 {
            return Err(ConfigError::new("grid.n", "blow-up diagnostics need n >= 3"));
        }
        let n = self.dim as f64;
        for &e in &self.eps {
            if e < 2.0 && !(self.r < n / (2.0 - e)) {
                return Err(ConfigError::new(
                    "diagnostics.r",
                    format!("r = {} must stay below n / (2 - eps) = {} for eps = {e}", self.r, n / (2.0 - e)),
                ));
            }
        }
        if self.series == Series::Synthetic && self.t_blowup.is_none() {
            return Err(ConfigError::new("diagnostics.T", "the synthetic family needs a blow-up time"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_serialize_every_key() {
        let text = ExperimentConfig::default().serialize();
        assert_eq!(text.lines().count(), KEYS.len());
        assert!(text.contains("grid.N=32\n"));
        assert!(text.contains("diagnostics.pq=2:2\n"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = ExperimentConfig::parse("# grid\n\n  grid.N = 16 \n").unwrap();
        assert_eq!(cfg.size, 16);
    }

    #[test]
    fn errors_name_the_key() {
        let e = ExperimentConfig::parse("grid.N=abc").unwrap_err();
        assert_eq!(e.path, "grid.N");
        let e = ExperimentConfig::parse("grid.x=1").unwrap_err();
        assert_eq!(e.to_string(), "grid.x: unknown key");
        let e = ExperimentConfig::parse("grid.N").unwrap_err();
        assert_eq!(e.path, "line 1");
    }

    #[test]
    fn lists_and_options() {
        let cfg = ExperimentConfig::parse("diagnostics.pq=2:2, inf:1\ndiagnostics.T=none\nsolver.init=bsnap:a/b.bsnap").unwrap();
        assert_eq!(cfg.pq[1], (Exponent::INFINITY, Exponent::ONE));
        assert_eq!(cfg.t_blowup, None);
        assert_eq!(cfg.init, Init::Snapshot(PathBuf::from("a/b.bsnap")));
    }

    #[test]
    fn diagnostics_bound_on_r() {
        let cfg = ExperimentConfig::parse("diagnostics.eps=1.5\ndiagnostics.r=6").unwrap();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.validate_diagnostics().unwrap_err().path, "diagnostics.r");
        let cfg = ExperimentConfig::parse("diagnostics.eps=2\ndiagnostics.r=50").unwrap();
        assert!(cfg.validate_diagnostics().is_ok());
    }
}
