use super::{EnvConfig, EnvState};
use crate::error::{Error, Result};

/// Executes a joint-position command over `exec_time` seconds.
///
/// The command is clamped to the joint limits and tracked with rate-limited
/// first-order motion: every substep each joint moves toward its target by at
/// most `max_velocity * substep_dt`. The resulting velocity is the average
/// over the whole window.
pub fn execute_trajectory(state: &EnvState, q_cmd: &[f64], cfg: &EnvConfig) -> Result<EnvState> {
    let joints = &cfg.robot.joints;
    if q_cmd.len() != joints.len() {
        return Err(Error::Dimension {
            expected: joints.len(),
            actual: q_cmd.len(),
        });
    }
    let substeps = cfg.substeps();
    let dt = cfg.substep_dt;
    let mut q = state.q.clone();
    for (i, joint) in joints.iter().enumerate() {
        let target = joint.clamp(q_cmd[i]);
        let max_travel = joint.max_velocity * dt;
        let mut qi = q[i];
        for _ in 0..substeps {
            qi = joint.clamp(qi + (target - qi).clamp(-max_travel, max_travel));
        }
        q[i] = qi;
    }
    let qdot = q
        .iter()
        .zip(&state.q)
        .map(|(after, before)| (after - before) / cfg.exec_time)
        .collect();
    Ok(EnvState {
        q,
        qdot,
        steps_taken: state.steps_taken,
    })
}
