use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{from_json_str, Error, Result};
use crate::ppo::{Algorithm, PpoHyper};

pub const DEFAULT_EXEC_TIMES: [f64; 4] = [1.0, 0.1, 0.01, 0.001];

/// Environment given by preset name (`scara_3dof`, `scara_4dof`), by path to
/// an environment JSON file, or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvSource {
    Named(String),
    Inline(serde_json::Value),
}

impl Default for EnvSource {
    fn default() -> Self {
        EnvSource::Named("scara_3dof".into())
    }
}

fn default_exec_times() -> Vec<f64> {
    DEFAULT_EXEC_TIMES.to_vec()
}
fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Ppo1, Algorithm::Ppo2]
}
fn default_eval_episodes() -> usize {
    20
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("runs")
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub env: EnvSource,
    /// Environments covered by a sweep; defaults to `env` alone.
    #[serde(default)]
    pub envs: Option<Vec<EnvSource>>,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    /// Algorithms covered by a sweep.
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub hyper: PpoHyper,
    #[serde(default)]
    pub seed: u64,
    /// Seeds for sweeps; defaults to five consecutive seeds from `seed`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Overrides the environment's execution time for single runs.
    #[serde(default)]
    pub exec_time: Option<f64>,
    #[serde(default = "default_exec_times")]
    pub exec_times: Vec<f64>,
    #[serde(default = "default_eval_episodes")]
    pub eval_episodes: usize,
    #[serde(default = "default_true")]
    pub deterministic_eval: bool,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Write real elapsed time into the training log. When off the column is
    /// zero and identical runs produce identical logs.
    #[serde(default = "default_true")]
    pub record_wall_clock: bool,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_algorithm() -> Algorithm {
    Algorithm::Ppo1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        from_json_str("{}").expect("empty config uses defaults")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = from_json_str(text)?;
        cfg.base_dir = base_dir.to_path_buf();
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base_dir.join(&cfg.out_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new("")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.exec_times.is_empty() || self.exec_times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::semantic("exec_times", "must be a non-empty list of positive seconds"));
        }
        if let Some(t) = self.exec_time {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::semantic("exec_time", "must be positive"));
            }
        }
        if self.eval_episodes == 0 {
            return Err(Error::semantic("eval_episodes", "must be >= 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::semantic("algorithms", "must not be empty"));
        }
        if matches!(&self.envs, Some(e) if e.is_empty()) {
            return Err(Error::semantic("envs", "must not be empty"));
        }
        if matches!(&self.seeds, Some(s) if s.is_empty()) {
            return Err(Error::semantic("seeds", "must not be empty"));
        }
        self.hyper.validate()
    }

    pub fn sweep_seeds(&self) -> Vec<u64> {
        self.seeds
            .clone()
            .unwrap_or_else(|| (0..5).map(|i| self.seed.wrapping_add(i)).collect())
    }

    pub fn sweep_envs(&self) -> Vec<EnvSource> {
        self.envs.clone().unwrap_or_else(|| vec![self.env.clone()])
    }

    /// Resolves `env`, applying `exec_time` when set. The result is
    /// validated.
    pub fn resolve_env(&self) -> Result<EnvConfig> {
        self.resolve_source(&self.env)
    }

    pub fn resolve_source(&self, source: &EnvSource) -> Result<EnvConfig> {
        let mut env = match source {
            EnvSource::Named(name) => {
                let path = self.base_dir.join(name);
                if path.is_file() {
                    EnvConfig::load(path)?
                } else {
                    match name.as_str() {
                        "scara_3dof" => EnvConfig::scara_3dof(0.001),
                        "scara_4dof" => EnvConfig::scara_4dof(0.001),
                        _ => {
                            return Err(Error::Config(format!(
                                "env `{name}` is neither a preset nor a readable file"
                            )))
                        }
                    }
                }
            }
            EnvSource::Inline(value) => EnvConfig::from_json(&value.to_string(), &self.base_dir)?,
        };
        if let Some(t) = self.exec_time {
            env.exec_time = t;
        }
        env.validate()?;
        Ok(env)
    }
}

/// Loads the environment used to evaluate a policy from any of: a run's
/// `metadata.json`, an experiment config, or an environment config.
pub fn load_env_for_eval(path: impl AsRef<Path>) -> Result<EnvConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = from_json_str(&text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    if value.get("format_versions").is_some() {
        let meta: super::RunMetadata = from_json_str(&text)?;
        meta.env.validate()?;
        Ok(meta.env)
    } else if value.get("robot").is_some() {
        EnvConfig::from_json(&text, base)
    } else {
        ExperimentConfig::from_json(&text, base)?.resolve_env()
    }
}
