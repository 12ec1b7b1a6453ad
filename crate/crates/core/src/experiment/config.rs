//! `key=value` configuration files and their merge with command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{ExperimentConfig, Measure, NoiseFamily, OutputFormat};
use crate::error::{Error, Result};
use crate::walk::SchemeKind;

/// Partially specified configuration. Unset fields fall back to the other
/// source in [`ConfigOverrides::or`], then to [`ExperimentConfig::default`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub scheme: Option<SchemeKind>,
    pub steps: Option<usize>,
    pub noise: Option<NoiseFamily>,
    pub k: Option<usize>,
    pub ps: Option<Vec<f64>>,
    pub theta: Option<f64>,
    pub measures: Option<Vec<Measure>>,
    pub preset: Option<String>,
    pub formats: Option<Vec<OutputFormat>>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

/// Comma-separated list.
pub(crate) fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_one(key, s))
        .collect()
}

fn parse_named<T: FromStr<Err = Error>>(value: &str) -> Result<T> {
    value.trim().parse()
}

fn parse_named_list<T: FromStr<Err = Error>>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

impl ConfigOverrides {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = ConfigOverrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scheme" => c.scheme = Some(parse_named(value)?),
                "steps" => c.steps = Some(parse_one(key, value)?),
                "noise" => c.noise = Some(parse_named(value)?),
                "k" => c.k = Some(parse_one(key, value)?),
                "p" => c.ps = Some(parse_list(key, value)?),
                "theta" => c.theta = Some(parse_one(key, value)?),
                "measure" => c.measures = Some(parse_named_list(value)?),
                "preset" => c.preset = Some(value.to_string()),
                "format" => c.formats = Some(parse_named_list(value)?),
                "out" => c.out = Some(PathBuf::from(value)),
                "seed" => c.seed = Some(parse_one(key, value)?),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        n + 1
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Field-wise `self` if set, else `fallback`.
    pub fn or(self, fallback: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            scheme: self.scheme.or(fallback.scheme),
            steps: self.steps.or(fallback.steps),
            noise: self.noise.or(fallback.noise),
            k: self.k.or(fallback.k),
            ps: self.ps.or(fallback.ps),
            theta: self.theta.or(fallback.theta),
            measures: self.measures.or(fallback.measures),
            preset: self.preset.or(fallback.preset),
            formats: self.formats.or(fallback.formats),
            out: self.out.or(fallback.out),
            seed: self.seed.or(fallback.seed),
        }
    }

    /// Fills unset fields from the defaults and validates.
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let d = ExperimentConfig::default();
        let config = ExperimentConfig {
            scheme: self.scheme.unwrap_or(d.scheme),
            theta: self.theta.unwrap_or(d.theta),
            steps: self.steps.unwrap_or(d.steps),
            noise: self.noise.unwrap_or(d.noise),
            ps: self.ps.unwrap_or(d.ps),
            k: self.k.unwrap_or(d.k),
            measures: self.measures.unwrap_or(d.measures),
            out: self.out.or(d.out),
            formats: self.formats.unwrap_or(d.formats),
            seed: self.seed.unwrap_or(d.seed),
        };
        config.validate()?;
        Ok(config)
    }
}
