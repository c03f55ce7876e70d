use std::path::Path;

use serde::{Deserialize, Serialize};

use super::eval::mean_std;
use super::run::{cmd_train, RunSummary};
use super::{create_dir, write_file, ExperimentConfig};
use crate::error::{Error, Result};
use crate::ppo::Algorithm;

pub const TABLE_HEADER: &str =
    "dof,algorithm,exec_time_s,mean_distance_mm,std_distance_mm,success_rate,episodes,wall_clock_s";
pub const PER_SEED_HEADER: &str =
    "dof,algorithm,exec_time_s,seed,mean_distance_mm,std_distance_mm,success_rate,episodes,wall_clock_s,status";

pub const TABLE_FILE: &str = "table.csv";
pub const PER_SEED_FILE: &str = "table_per_seed.csv";

/// Pooled statistics for one (environment, algorithm, execution time) cell.
/// Distances pool the evaluation episodes of every successful seed;
/// `wall_clock_s` is the mean training time per successful run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dof: usize,
    pub algorithm: Algorithm,
    pub exec_time_s: f64,
    pub mean_distance_mm: f64,
    pub std_distance_mm: f64,
    pub success_rate: f64,
    pub episodes: usize,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub dof: usize,
    pub algorithm: Algorithm,
    pub exec_time_s: f64,
    pub seed: u64,
    pub mean_distance_mm: f64,
    pub std_distance_mm: f64,
    pub success_rate: f64,
    pub episodes: usize,
    pub wall_clock_s: f64,
    /// `ok`, or the error kind and message of a failed run.
    pub status: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub per_seed: Vec<SeedRow>,
}

impl SweepTable {
    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        write_file(&dir.join(TABLE_FILE), &to_csv(TABLE_HEADER, &self.rows)?)?;
        write_file(&dir.join(PER_SEED_FILE), &to_csv(PER_SEED_HEADER, &self.per_seed)?)
    }
}

fn to_csv<T: Serialize>(header: &str, rows: &[T]) -> Result<Vec<u8>> {
    let mut out = format!("{header}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io(Path::new("<csv>"), e))?;
    }
    Ok(out)
}

fn exec_label(t: f64) -> String {
    format!("exec_{t}s")
}

/// Trains and evaluates every (environment, algorithm, execution time, seed)
/// combination in sequence. A failing run becomes a row with its error in
/// `status`; the sweep carries on. Tables are rewritten after every run.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let sources = cfg.sweep_envs();
    let mut base = cfg.clone();
    base.exec_time = None;
    let envs = sources
        .iter()
        .map(|s| base.resolve_source(s))
        .collect::<Result<Vec<_>>>()?;
    create_dir(&cfg.out_dir)?;

    let seeds = cfg.sweep_seeds();
    let mut table = SweepTable::default();
    for (env_index, (source, env)) in sources.iter().zip(&envs).enumerate() {
        let dof = env.dof();
        let env_dir = if sources.len() > 1 {
            format!("env{env_index}_dof{dof}")
        } else {
            format!("dof{dof}")
        };
        for &algorithm in &cfg.algorithms {
            for &exec_time in &cfg.exec_times {
                let mut done: Vec<RunSummary> = Vec::new();
                for &seed in &seeds {
                    let mut run = cfg.clone();
                    run.env = source.clone();
                    run.envs = None;
                    run.algorithm = algorithm;
                    run.exec_time = Some(exec_time);
                    run.seed = seed;
                    run.out_dir = cfg
                        .out_dir
                        .join(&env_dir)
                        .join(algorithm.name())
                        .join(exec_label(exec_time))
                        .join(format!("seed_{seed}"));
                    let row = match cmd_train(&run) {
                        Ok(summary) => {
                            let row = SeedRow {
                                dof,
                                algorithm,
                                exec_time_s: exec_time,
                                seed,
                                mean_distance_mm: summary.eval.mean_distance_mm,
                                std_distance_mm: summary.eval.std_distance_mm,
                                success_rate: summary.eval.success_rate,
                                episodes: summary.eval.episodes,
                                wall_clock_s: summary.train_wall_clock_s,
                                status: "ok".into(),
                            };
                            done.push(summary);
                            row
                        }
                        Err(e) => SeedRow {
                            dof,
                            algorithm,
                            exec_time_s: exec_time,
                            seed,
                            mean_distance_mm: f64::NAN,
                            std_distance_mm: f64::NAN,
                            success_rate: f64::NAN,
                            episodes: 0,
                            wall_clock_s: f64::NAN,
                            status: format!("{}: {e}", e.kind()),
                        },
                    };
                    table.per_seed.push(row);
                    table.write_csvs(&cfg.out_dir)?;
                }
                table.rows.push(pool(dof, algorithm, exec_time, &done));
                table.write_csvs(&cfg.out_dir)?;
            }
        }
    }
    Ok(table)
}

fn pool(dof: usize, algorithm: Algorithm, exec_time_s: f64, runs: &[RunSummary]) -> SweepRow {
    let distances: Vec<f64> = runs.iter().flat_map(|r| r.eval_distances_mm.iter().copied()).collect();
    let (mean, std) = mean_std(&distances);
    let successes: f64 = runs
        .iter()
        .map(|r| (r.eval.success_rate * r.eval.episodes as f64).round())
        .sum();
    let wall: Vec<f64> = runs.iter().map(|r| r.train_wall_clock_s).collect();
    SweepRow {
        dof,
        algorithm,
        exec_time_s,
        mean_distance_mm: mean,
        std_distance_mm: std,
        success_rate: if distances.is_empty() { f64::NAN } else { (successes / distances.len() as f64).clamp(0.0, 1.0) },
        episodes: distances.len(),
        wall_clock_s: mean_std(&wall).0,
    }
}
