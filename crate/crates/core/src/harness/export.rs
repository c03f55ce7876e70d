use std::path::Path;
use std::sync::Arc;

use super::eval::{check_compatible, rollout_episode};
use super::write_file;
use crate::env::{euclid_mm, rmse, EnvConfig, ReachEnv};
use crate::error::Result;
use crate::nn::{load_params, PolicyParams};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub sim_time_s: f64,
    pub q: Vec<f64>,
    pub ee: [f64; 3],
    pub distance_mm: f64,
}

/// Records one deterministic episode. Row 0 is the reset state; each
/// following row is the state after that many actions.
pub fn record_trajectory(params: &PolicyParams, env: &EnvConfig) -> Result<Vec<TrajectoryRow>> {
    check_compatible(params, env)?;
    let cfg = Arc::new(env.clone());
    let mut sim = ReachEnv::new(cfg.clone());
    let start = sim.reset();
    let mut rows = vec![TrajectoryRow {
        step: 0,
        sim_time_s: 0.0,
        q: start.q.clone(),
        ee: start.ee_position,
        distance_mm: euclid_mm(rmse(&start.ee_position, &cfg.goal)),
    }];
    rollout_episode(params, &mut sim, None, |env, r| {
        let step = env.state().steps_taken;
        rows.push(TrajectoryRow {
            step,
            sim_time_s: step as f64 * cfg.exec_time,
            q: r.observation.q.clone(),
            ee: r.observation.ee_position,
            distance_mm: r.info.euclid_mm,
        });
    })?;
    Ok(rows)
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> Result<Vec<u8>> {
    let dof = rows.first().map_or(0, |r| r.q.len());
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["step".to_string(), "sim_time_s".to_string()];
        header.extend((0..dof).map(|i| format!("q{i}")));
        header.extend(["ee_x", "ee_y", "ee_z", "distance_mm"].map(String::from));
        w.write_record(&header)?;
        for r in rows {
            let mut rec = vec![r.step.to_string(), r.sim_time_s.to_string()];
            rec.extend(r.q.iter().map(f64::to_string));
            rec.extend(r.ee.iter().map(f64::to_string));
            rec.push(r.distance_mm.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| crate::Error::io(Path::new("<csv>"), e))?;
    }
    Ok(out)
}

/// Loads a policy, records one deterministic episode, and writes it as CSV.
pub fn cmd_export_trajectory(params_path: &Path, env: &EnvConfig, out_path: &Path) -> Result<Vec<TrajectoryRow>> {
    let params = load_params(params_path)?;
    let rows = record_trajectory(&params, env)?;
    write_file(out_path, &trajectory_csv(&rows)?)?;
    Ok(rows)
}
