//! Run configuration: `key = value` lines, `#` comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::arith::ExactOptions;
use crate::error::{Error, Result};
use crate::estimators::EstimatorOptions;
use crate::saddle::SaddleOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("output_format must be csv or json, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub sieve_segment_size: usize,
    pub sieve_limit: u64,
    pub node_budget: u64,
    /// Saddle residual target, relative to log x.
    pub residual_tol: f64,
    pub max_iters: usize,
    pub epsilon0: f64,
    pub lambda: f64,
    /// Smallest y at which the saddle-point inequalities are checked.
    pub y_floor: f64,
    /// Where smallest-prime-factor tables are cached; none disables the cache.
    pub cache_dir: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        let e = ExactOptions::default();
        let s = SaddleOptions::default();
        Config {
            sieve_segment_size: e.segment_size,
            sieve_limit: e.sieve_limit,
            node_budget: e.node_budget,
            residual_tol: s.residual_tol,
            max_iters: s.max_iters,
            epsilon0: 0.1,
            lambda: 0.25,
            y_floor: 1e3,
            cache_dir: None,
            output_format: OutputFormat::Csv,
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

/// Integers may be written as 1e9.
fn int(key: &str, v: &str) -> Result<u64> {
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    let f: f64 = num(key, v)?;
    if f.fract() == 0.0 && (0.0..1.8e19).contains(&f) {
        Ok(f as u64)
    } else {
        Err(Error::Config(format!("{key}: {v:?} is not a whole number")))
    }
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "sieve_segment_size" => self.sieve_segment_size = int(key, v)? as usize,
            "sieve_limit" => self.sieve_limit = int(key, v)?,
            "node_budget" => self.node_budget = int(key, v)?,
            "residual_tol" => self.residual_tol = num(key, v)?,
            "max_iters" => self.max_iters = int(key, v)? as usize,
            "epsilon0" => self.epsilon0 = num(key, v)?,
            "lambda" => self.lambda = num(key, v)?,
            "y_floor" => self.y_floor = num(key, v)?,
            "cache_dir" => self.cache_dir = (!v.is_empty()).then(|| PathBuf::from(v)),
            "output_format" => self.output_format = v.parse()?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive")))
            }
        };
        pos("sieve_segment_size", self.sieve_segment_size > 0)?;
        pos("sieve_limit", self.sieve_limit > 0)?;
        pos("node_budget", self.node_budget > 0)?;
        pos("residual_tol", self.residual_tol > 0.0 && self.residual_tol.is_finite())?;
        pos("max_iters", self.max_iters > 0)?;
        pos("epsilon0", self.epsilon0 > 0.0 && self.epsilon0.is_finite())?;
        pos("lambda", self.lambda > 0.0 && self.lambda < 1.5)?;
        pos("y_floor", self.y_floor > 0.0 && self.y_floor.is_finite())?;
        Ok(())
    }

    /// Every field as sorted `key=value` lines; the input to the config hash.
    pub fn canonical(&self) -> String {
        let cache = self
            .cache_dir
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        let mut lines = vec![
            format!("cache_dir={cache}"),
            format!("epsilon0={:e}", self.epsilon0),
            format!("lambda={:e}", self.lambda),
            format!("max_iters={}", self.max_iters),
            format!("node_budget={}", self.node_budget),
            format!("output_format={}", self.output_format),
            format!("residual_tol={:e}", self.residual_tol),
            format!("sieve_limit={}", self.sieve_limit),
            format!("sieve_segment_size={}", self.sieve_segment_size),
            format!("y_floor={:e}", self.y_floor),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            saddle: SaddleOptions { residual_tol: self.residual_tol, max_iters: self.max_iters },
            exact: self.exact_options(),
            epsilon0: self.epsilon0,
            lambda: self.lambda,
        }
    }

    pub fn exact_options(&self) -> ExactOptions {
        ExactOptions {
            segment_size: self.sieve_segment_size,
            sieve_limit: self.sieve_limit,
            node_budget: self.node_budget,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_defaults() {
        let c = Config::parse("# sweep\nnode_budget = 1e6\noutput_format=json\n\ncache_dir = /tmp/x # trailing\n").unwrap();
        assert_eq!(c.node_budget, 1_000_000);
        assert_eq!(c.output_format, OutputFormat::Json);
        assert_eq!(c.cache_dir, Some(PathBuf::from("/tmp/x")));
        assert_eq!(c.sieve_segment_size, 1 << 20);
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("node_budget").is_err());
        assert!(Config::parse("bogus = 1").is_err());
        assert!(Config::parse("node_budget = 0").is_err());
        assert!(Config::parse("residual_tol = -1").is_err());
        assert!(Config::parse("output_format = xml").is_err());
        assert!(Config::parse("node_budget = 1.5").is_err());
    }

    #[test]
    fn canonical_is_stable() {
        let a = Config::parse("lambda=0.25\nnode_budget=1000000000").unwrap();
        assert_eq!(a.canonical(), Config::default().canonical());
        let b = Config::parse("lambda=0.3").unwrap();
        assert_ne!(a.canonical(), b.canonical());
    }
}
