//! Run configuration: a flat `key = value` file (TOML syntax) plus overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::params::{ParamError, QParams};
use crate::rmatrix::DybeConvention;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Params(#[from] ParamError),
}

fn field(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.to_string(), msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub q: String,
    pub r: String,
    pub c: i64,
    /// Truncation order `M` of mode sums and series.
    pub order: usize,
    pub prec: u32,
    /// Sample points per exchange suite.
    pub samples: usize,
    /// Random draws for the dynamical Yang-Baxter suite.
    pub draws: usize,
    /// Largest `|m|` in the mode-algebra suites.
    pub max_mode: i64,
    /// Trapezoid points for the contour normalization.
    pub quad_points: usize,
    pub seed: u64,
    /// Suite filters; empty selects every suite.
    pub suites: Vec<String>,
    pub dybe_convention: DybeConvention,
    pub out: Option<PathBuf>,
    pub wall_time: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            q: "0.4".into(),
            r: "6.3".into(),
            c: 1,
            order: 24,
            prec: 128,
            samples: 100,
            draws: 100,
            max_mode: 12,
            quad_points: 2048,
            seed: 7,
            suites: Vec::new(),
            dybe_convention: DybeConvention::default(),
            out: None,
            wall_time: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "N",
    "q",
    "r",
    "c",
    "order",
    "prec",
    "samples",
    "draws",
    "max_mode",
    "quad_points",
    "seed",
    "suite",
    "dybe_convention",
    "out",
    "wall_time",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| field(key, format!("{e}: `{v}`")))
}

impl RunConfig {
    /// Set one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "N" | "n" => self.n = parse_num(key, value)?,
            "q" => self.q = value.trim().to_string(),
            "r" => self.r = value.trim().to_string(),
            "c" => self.c = parse_num(key, value)?,
            "order" | "M" => self.order = parse_num(key, value)?,
            "prec" | "P" => self.prec = parse_num(key, value)?,
            "samples" => self.samples = parse_num(key, value)?,
            "draws" => self.draws = parse_num(key, value)?,
            "max_mode" => self.max_mode = parse_num(key, value)?,
            "quad_points" => self.quad_points = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "suite" => {
                self.suites = value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
            }
            "dybe_convention" => self.dybe_convention = value.trim().parse().map_err(|e: String| field(key, e))?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "wall_time" => self.wall_time = parse_num(key, value)?,
            _ => return Err(field(key, "unknown key")),
        }
        Ok(())
    }

    /// Read `key = value` lines; values may be bare numbers, booleans or quoted strings.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        let mut cfg = RunConfig::default();
        for (key, v) in &table {
            let s = match v {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(x) => x.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                toml::Value::Array(a) => a
                    .iter()
                    .map(|x| x.as_str().map(String::from).ok_or_else(|| field(key, "list entries must be strings")))
                    .collect::<Result<Vec<_>, _>>()?
                    .join(","),
                _ => return Err(field(key, "nested tables and dates are not supported")),
            };
            cfg.set(key, &s)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Check every field and build the parameter pack.
    pub fn validate(&self) -> Result<QParams, ConfigError> {
        if self.c != 1 {
            return Err(field("c", "only level c = 1 is realized by the free fields"));
        }
        if self.n > 8 {
            return Err(field("N", "N above 8 is outside the supported range"));
        }
        if self.order == 0 {
            return Err(field("order", "must be positive"));
        }
        if self.samples == 0 {
            return Err(field("samples", "must be positive"));
        }
        if self.draws == 0 {
            return Err(field("draws", "must be positive"));
        }
        if !(1..=64).contains(&self.max_mode) {
            return Err(field("max_mode", "must lie in 1..=64"));
        }
        if self.quad_points < 16 {
            return Err(field("quad_points", "must be at least 16"));
        }
        Ok(QParams::parse(&self.q, &self.r, self.n, self.c, self.prec)?)
    }

    /// Echo written into report headers. The output path and wall-time flag
    /// do not affect results and are left out.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("N".into(), self.n.to_string());
        m.insert("q".into(), self.q.clone());
        m.insert("r".into(), self.r.clone());
        m.insert("c".into(), self.c.to_string());
        m.insert("order".into(), self.order.to_string());
        m.insert("prec".into(), self.prec.to_string());
        m.insert("samples".into(), self.samples.to_string());
        m.insert("draws".into(), self.draws.to_string());
        m.insert("max_mode".into(), self.max_mode.to_string());
        m.insert("quad_points".into(), self.quad_points.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("suite".into(), self.suites.join(","));
        m.insert("dybe_convention".into(), self.dybe_convention.to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_override_defaults() {
        let cfg = RunConfig::from_toml_str("N = 2\nq = 0.35\nsuite = \"rmat.*, wn.cn\"\nseed = 11\n").unwrap();
        assert_eq!(cfg.n, 2);
        assert_eq!(cfg.q, "0.35");
        assert_eq!(cfg.suites, vec!["rmat.*", "wn.cn"]);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.order, 24);
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::from_toml_str("samples = \"many\"").unwrap_err();
        assert!(e.to_string().contains("`samples`"), "{e}");
        let e = RunConfig::from_toml_str("colour = 3").unwrap_err();
        assert!(e.to_string().contains("`colour`"), "{e}");
        let cfg = RunConfig::from_toml_str("q = 1.5").unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("`q`"));
        let cfg = RunConfig::from_toml_str("c = 2").unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("`c`"));
    }
}
