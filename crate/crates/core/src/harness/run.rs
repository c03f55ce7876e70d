use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::eval::{evaluate, EvalRow};
use super::{create_dir, write_file, ExperimentConfig};
use crate::env::{EnvConfig, ReachEnv};
use crate::error::{Error, Result};
use crate::nn::{load_params, save_params, MlpSpec, FORMAT_VERSION, OBS_CLIP};
use crate::par::Exec;
use crate::ppo::{train, Algorithm, CsvLogSink, PpoHyper};

pub const METADATA_VERSION: u32 = 1;
pub const TRAIN_LOG_VERSION: u32 = 1;

pub const PARAMS_FILE: &str = "params.bin";
pub const TRAIN_LOG_FILE: &str = "train_log.csv";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormatVersions {
    pub params: u32,
    pub train_log: u32,
    pub metadata: u32,
}

/// Result of one train-then-evaluate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub timesteps: usize,
    pub train_wall_clock_s: f64,
    pub eval_deterministic: bool,
    pub eval_seed: u64,
    pub eval: EvalRow,
    /// Final distance of every evaluation episode, mm.
    pub eval_distances_mm: Vec<f64>,
}

/// Contents of `metadata.json`. Holds everything needed to rebuild the
/// environment and repeat the evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub format_versions: FormatVersions,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub env: EnvConfig,
    pub hyper: PpoHyper,
    pub network: MlpSpec,
    pub observation: Vec<String>,
    pub observation_normalization: String,
    pub summary: RunSummary,
}

fn observation_layout(dof: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..dof).map(|i| format!("q{i}")).collect();
    names.extend((0..dof).map(|i| format!("qdot{i}")));
    names.extend(["ee_x", "ee_y", "ee_z", "ee_minus_goal_x", "ee_minus_goal_y", "ee_minus_goal_z"].map(String::from));
    names
}

/// Trains with `cfg.algorithm` and `cfg.seed`, evaluates the result, and
/// writes `params.bin`, `train_log.csv` and `metadata.json` into
/// `cfg.out_dir`.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let env = cfg.resolve_env()?;
    create_dir(&cfg.out_dir)?;

    let log_path = cfg.out_dir.join(TRAIN_LOG_FILE);
    let file = File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    let mut sink = CsvLogSink::new(BufWriter::new(file), cfg.record_wall_clock)?;
    let shared = std::sync::Arc::new(env.clone());
    let outcome = train(
        cfg.algorithm,
        |_| Ok(ReachEnv::new(shared.clone())),
        &cfg.hyper,
        cfg.seed,
        &mut [&mut sink],
    )?;
    sink.into_inner()?;

    save_params(&outcome.params, cfg.out_dir.join(PARAMS_FILE))?;

    let stats = evaluate(
        &outcome.params,
        &env,
        cfg.eval_episodes,
        cfg.deterministic_eval,
        cfg.seed,
        cfg.hyper.exec,
    )?;
    let summary = RunSummary {
        iterations: outcome.iterations,
        timesteps: outcome.timesteps,
        train_wall_clock_s: outcome.wall_clock_s,
        eval_deterministic: cfg.deterministic_eval,
        eval_seed: cfg.seed,
        eval: EvalRow::new(&env, Some(cfg.algorithm), &stats),
        eval_distances_mm: stats.distances_mm(),
    };
    let meta = RunMetadata {
        format_versions: FormatVersions {
            params: FORMAT_VERSION,
            train_log: TRAIN_LOG_VERSION,
            metadata: METADATA_VERSION,
        },
        algorithm: cfg.algorithm,
        seed: cfg.seed,
        network: outcome.params.spec.clone(),
        observation: observation_layout(env.dof()),
        observation_normalization: format!(
            "running mean/variance, clipped to +-{}, frozen during evaluation",
            OBS_CLIP
        ),
        env,
        hyper: cfg.hyper.clone(),
        summary: summary.clone(),
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_file(&cfg.out_dir.join(METADATA_FILE), json.as_bytes())?;
    Ok(summary)
}

/// Evaluates a saved policy.
pub fn cmd_eval(
    params_path: &Path,
    env: &EnvConfig,
    algorithm: Option<Algorithm>,
    episodes: usize,
    deterministic: bool,
    seed: u64,
    exec: Exec,
) -> Result<EvalRow> {
    let params = load_params(params_path)?;
    let stats = evaluate(&params, env, episodes, deterministic, seed, exec)?;
    Ok(EvalRow::new(env, algorithm, &stats))
}

impl RunMetadata {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        crate::error::from_json_str(&text)
    }
}
