//! Experiment configuration files (`"schema": 1`).

use std::path::{Path, PathBuf};

use lcslab_core::cells::GenericityParams;
use lcslab_core::models::check_clt_hypotheses;
use lcslab_core::LetterDistribution;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    CltWords,
    TwPermutations,
    GammaScan,
    Genericity,
    SteinProbe,
    Decompose,
}

/// Letter law, written as `{"uniform": m}`, `{"biased_binary": p}` or
/// `{"probs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistSpec {
    Uniform(usize),
    BiasedBinary(f64),
    Probs(Vec<f64>),
}

impl DistSpec {
    pub fn build(&self) -> LabResult<LetterDistribution> {
        Ok(match self {
            DistSpec::Uniform(m) => LetterDistribution::uniform(*m)?,
            DistSpec::BiasedBinary(p) => LetterDistribution::biased_binary(*p)?,
            DistSpec::Probs(p) => LetterDistribution::new(p.clone())?,
        })
    }
}

fn default_experiment_id() -> String {
    "experiment".to_owned()
}
fn default_alpha() -> f64 {
    0.75
}
fn default_s1() -> f64 {
    0.5
}
fn default_s2() -> f64 {
    2.0
}
fn default_c1() -> f64 {
    1.0
}
fn default_ratio() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub kind: Kind,
    #[serde(default = "default_experiment_id")]
    pub experiment_id: String,
    /// Required by every kind except `tw_permutations`.
    #[serde(default)]
    pub dist: Option<DistSpec>,
    pub n_values: Vec<usize>,
    pub reps: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_s1")]
    pub s1: f64,
    #[serde(default = "default_s2")]
    pub s2: f64,
    #[serde(default = "default_c1")]
    pub c1: f64,
    /// `delta` for the probability bound; estimated from the growth
    /// constants when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    /// `|y| / |x|` for `gamma_scan`.
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    /// Inner draws per replication for `stein_probe`.
    #[serde(default)]
    pub inner_draws: Option<usize>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Run word experiments on laws that fail the CLT hypotheses.
    #[serde(default)]
    pub force: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let cfg = Self::load_unchecked(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without [`validate`](Self::validate), for callers that adjust
    /// fields first.
    pub fn load_unchecked(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> LabResult<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(LabError::Config(format!("unsupported schema {}", self.schema)));
        }
        if self.reps == 0 {
            return Err(LabError::Config("reps must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Config("n_values must be nonempty and increasing".into()));
        }
        if self.n_values[0] == 0 {
            return Err(LabError::Config("n_values must be positive".into()));
        }
        if self.kind != Kind::TwPermutations {
            let dist = self.distribution()?;
            if self.kind == Kind::CltWords && !self.force && !check_clt_hypotheses(&dist).satisfied {
                return Err(LabError::Config(
                    "distribution fails the CLT hypotheses; set force to run anyway".into(),
                ));
            }
        }
        if matches!(self.kind, Kind::Genericity | Kind::Decompose) {
            self.genericity_params(self.delta.unwrap_or(1.0))?;
        }
        if self.kind == Kind::GammaScan && !(self.ratio > 0.0) {
            return Err(LabError::Config("ratio must be positive".into()));
        }
        Ok(())
    }

    pub fn distribution(&self) -> LabResult<LetterDistribution> {
        self.dist
            .as_ref()
            .ok_or_else(|| LabError::Config(format!("{:?} needs a dist", self.kind)))?
            .build()
    }

    pub fn genericity_params(&self, delta: f64) -> LabResult<GenericityParams> {
        Ok(GenericityParams::new(self.alpha, self.s1, self.s2, delta, self.c1)?)
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"{"schema":1,"kind":"clt_words","dist":{"uniform":2},"n_values":[10,20],"reps":5,"force":true}"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(BASIC).unwrap();
        assert_eq!(c.kind, Kind::CltWords);
        assert_eq!(c.experiment_id, "experiment");
        assert_eq!((c.alpha, c.s1, c.s2, c.c1), (0.75, 0.5, 2.0, 1.0));
        assert_eq!(c.hash(), ExperimentConfig::from_json(BASIC).unwrap().hash());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            BASIC.replace("\"schema\":1", "\"schema\":2"),
            BASIC.replace("[10,20]", "[20,10]"),
            BASIC.replace("[10,20]", "[]"),
            BASIC.replace("\"reps\":5", "\"reps\":0"),
            BASIC.replace(",\"force\":true", ""),
            BASIC.replace("\"dist\":{\"uniform\":2},", ""),
            BASIC.replace("\"reps\":5", "\"reps\":5,\"bogus\":1"),
        ];
        for text in bad {
            assert!(ExperimentConfig::from_json(&text).is_err(), "{text}");
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::from_json(BASIC).unwrap();
        let b = ExperimentConfig::from_json(&BASIC.replace("\"reps\":5", "\"reps\":6")).unwrap();
        assert_ne!(a.hash(), b.hash());
    }
}
