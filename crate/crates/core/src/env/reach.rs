use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{compute_reward, euclid_mm, execute_trajectory, rmse, EnvConfig, Environment, Transition};
use crate::error::{Error, Result};
use crate::robot::{forward_kinematics, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub steps_taken: usize,
}

impl EnvState {
    pub fn zeros(n: usize) -> Self {
        EnvState {
            q: vec![0.0; n],
            qdot: vec![0.0; n],
            steps_taken: 0,
        }
    }
}

/// What the agent sees: joint state plus the end-effector and its offset
/// from the goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub ee_position: Vec3,
    pub ee_minus_goal: Vec3,
}

impl Observation {
    /// Flattened as `[q, qdot, ee_position, ee_minus_goal]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.q.len() + 6);
        out.extend_from_slice(&self.q);
        out.extend_from_slice(&self.qdot);
        out.extend_from_slice(&self.ee_position);
        out.extend_from_slice(&self.ee_minus_goal);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub rmse: f64,
    pub euclid_mm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// Reaching task: drive the end-effector within `success_rmse` of the goal.
///
/// Episodes start with every joint at zero and end on success or when
/// `max_episode_steps` actions have been taken.
#[derive(Debug, Clone)]
pub struct ReachEnv {
    cfg: Arc<EnvConfig>,
    state: EnvState,
    done: bool,
}

impl ReachEnv {
    /// Creates an environment already reset to the home pose. The config is
    /// assumed validated.
    pub fn new(cfg: Arc<EnvConfig>) -> Self {
        let state = EnvState::zeros(cfg.dof());
        ReachEnv {
            cfg,
            state,
            done: false,
        }
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn reset(&mut self) -> Observation {
        self.state = EnvState::zeros(self.cfg.dof());
        self.done = false;
        self.observe()
    }

    pub fn observe(&self) -> Observation {
        let ee_position = self.end_effector();
        let g = self.cfg.goal;
        Observation {
            q: self.state.q.clone(),
            qdot: self.state.qdot.clone(),
            ee_position,
            ee_minus_goal: [ee_position[0] - g[0], ee_position[1] - g[1], ee_position[2] - g[2]],
        }
    }

    fn end_effector(&self) -> Vec3 {
        forward_kinematics(&self.cfg.robot, &self.state.q)
            .expect("state is kept inside joint limits")
            .position
    }

    /// Applies a relative joint command. Action components are clamped to
    /// `[-1, 1]` and scaled by `action_scale`.
    pub fn step(&mut self, action: &[f64]) -> Result<StepResult> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        let n = self.cfg.dof();
        if action.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: action.len(),
            });
        }
        if action.iter().any(|a| a.is_nan()) {
            return Err(Error::NonFinite {
                context: "action".into(),
            });
        }
        let q_cmd: Vec<f64> = self
            .state
            .q
            .iter()
            .zip(action)
            .enumerate()
            .map(|(i, (q, a))| q + a.clamp(-1.0, 1.0) * self.cfg.action_scale.get(i))
            .collect();
        let mut next = execute_trajectory(&self.state, &q_cmd, &self.cfg)?;
        next.steps_taken = self.state.steps_taken + 1;
        self.state = next;

        let observation = self.observe();
        let err = rmse(&observation.ee_position, &self.cfg.goal);
        let reward = compute_reward(err, &self.cfg);
        let success = err < self.cfg.success_rmse;
        self.done = success || self.state.steps_taken >= self.cfg.max_episode_steps;
        Ok(StepResult {
            observation,
            reward,
            done: self.done,
            info: StepInfo {
                rmse: err,
                euclid_mm: euclid_mm(err),
            },
        })
    }
}

impl Environment for ReachEnv {
    fn observation_dim(&self) -> usize {
        self.cfg.observation_dim()
    }

    fn action_dim(&self) -> usize {
        self.cfg.dof()
    }

    fn reset(&mut self) -> Vec<f64> {
        ReachEnv::reset(self).to_vec()
    }

    fn step(&mut self, action: &[f64]) -> Result<Transition> {
        let r = ReachEnv::step(self, action)?;
        Ok(Transition {
            observation: r.observation.to_vec(),
            reward: r.reward,
            done: r.done,
        })
    }
}
