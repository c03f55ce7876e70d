//! Episodic reaching environment over a modular serial chain.

mod config;
mod reach;
mod reachability;
mod reward;
mod trajectory;

pub use config::{ActionScale, EnvConfig, RobotSource, GOAL_3DOF, GOAL_4DOF};
pub use reach::{EnvState, Observation, ReachEnv, StepInfo, StepResult};
pub use reachability::{search_reaching_configuration, ReachSearch};
pub use reward::{compute_reward, euclid_mm, rmse};
pub use trajectory::execute_trajectory;

use crate::error::Result;

/// Flat transition handed to the trainers.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// Minimal gym-style interface the PPO trainers are written against.
pub trait Environment: Send {
    fn observation_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn reset(&mut self) -> Vec<f64>;
    fn step(&mut self, action: &[f64]) -> Result<Transition>;
}
