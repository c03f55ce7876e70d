//! Experiment orchestration: training runs, evaluation, execution-time
//! sweeps, and trajectory export.

mod config;
mod eval;
mod export;
mod run;
mod sweep;

pub use config::{load_env_for_eval, EnvSource, ExperimentConfig, DEFAULT_EXEC_TIMES};
pub use eval::{evaluate, run_episode, EpisodeOutcome, EvalRow, EvalStats};
pub use export::{cmd_export_trajectory, record_trajectory, trajectory_csv, TrajectoryRow};
pub use run::{
    cmd_eval, cmd_train, FormatVersions, RunMetadata, RunSummary, METADATA_FILE, METADATA_VERSION, PARAMS_FILE,
    TRAIN_LOG_FILE, TRAIN_LOG_VERSION,
};
pub use sweep::{cmd_sweep, SeedRow, SweepRow, SweepTable, PER_SEED_FILE, PER_SEED_HEADER, TABLE_FILE, TABLE_HEADER};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}
