use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, ReachEnv, StepResult};
use crate::error::{Error, Result};
use crate::nn::{sample_action, PolicyParams};
use crate::par::Exec;
use crate::ppo::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    /// End-effector distance to the goal at the final step, millimeters.
    pub final_distance_mm: f64,
    pub final_rmse: f64,
    pub success: bool,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalStats {
    pub outcomes: Vec<EpisodeOutcome>,
}

impl EvalStats {
    pub fn distances_mm(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.final_distance_mm).collect()
    }

    /// Mean and population standard deviation of the final distances.
    pub fn mean_std_mm(&self) -> (f64, f64) {
        mean_std(&self.distances_mm())
    }

    pub fn success_rate(&self) -> f64 {
        let n = self.outcomes.len();
        self.outcomes.iter().filter(|o| o.success).count() as f64 / n as f64
    }
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One row of a distance report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub dof: usize,
    pub algorithm: Option<Algorithm>,
    pub exec_time: f64,
    pub mean_distance_mm: f64,
    pub std_distance_mm: f64,
    pub success_rate: f64,
    pub episodes: usize,
}

impl EvalRow {
    pub fn new(env: &EnvConfig, algorithm: Option<Algorithm>, stats: &EvalStats) -> Self {
        let (mean, std) = stats.mean_std_mm();
        EvalRow {
            dof: env.dof(),
            algorithm,
            exec_time: env.exec_time,
            mean_distance_mm: mean,
            std_distance_mm: std,
            success_rate: stats.success_rate(),
            episodes: stats.outcomes.len(),
        }
    }
}

pub(crate) fn check_compatible(params: &PolicyParams, env: &EnvConfig) -> Result<()> {
    if params.spec.input_dim != env.observation_dim() {
        return Err(Error::Dimension {
            expected: env.observation_dim(),
            actual: params.spec.input_dim,
        });
    }
    if params.spec.action_dim != env.dof() {
        return Err(Error::Dimension {
            expected: env.dof(),
            actual: params.spec.action_dim,
        });
    }
    Ok(())
}

/// Runs one episode with frozen normalizer statistics, calling `on_step`
/// after every transition. With `rng` set, actions are sampled; otherwise
/// the policy mean is used.
pub(crate) fn rollout_episode(
    params: &PolicyParams,
    env: &mut ReachEnv,
    mut rng: Option<&mut ChaCha8Rng>,
    mut on_step: impl FnMut(&ReachEnv, &StepResult),
) -> Result<EpisodeOutcome> {
    let mut obs = env.reset().to_vec();
    let log_std = params.weights.log_std.as_slice().expect("contiguous");
    loop {
        let input = params.normalize(&obs)?;
        let (mean, _) = params.forward(&input)?;
        let action = match rng.as_deref_mut() {
            Some(rng) => sample_action(&mean, log_std, rng).0,
            None => mean,
        };
        let r = env.step(&action)?;
        on_step(env, &r);
        if r.done {
            return Ok(EpisodeOutcome {
                final_distance_mm: r.info.euclid_mm,
                final_rmse: r.info.rmse,
                success: r.info.rmse < env.config().success_rmse,
                steps: env.state().steps_taken,
            });
        }
        obs = r.observation.to_vec();
    }
}

/// A single evaluation episode.
pub fn run_episode(
    params: &PolicyParams,
    env: Arc<EnvConfig>,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<EpisodeOutcome> {
    check_compatible(params, &env)?;
    rollout_episode(params, &mut ReachEnv::new(env), rng, |_, _| {})
}

/// Runs `episodes` independent episodes. Stochastic episodes draw from
/// per-episode streams of `seed`, so results do not depend on `exec`.
pub fn evaluate(
    params: &PolicyParams,
    env: &EnvConfig,
    episodes: usize,
    deterministic: bool,
    seed: u64,
    exec: Exec,
) -> Result<EvalStats> {
    check_compatible(params, env)?;
    if episodes == 0 {
        return Err(Error::Config("episodes must be >= 1".into()));
    }
    let env = Arc::new(env.clone());
    let outcomes = exec.map_range(episodes, |i| {
        let mut rng = (!deterministic).then(|| crate::ppo::worker_rng(seed, i));
        rollout_episode(params, &mut ReachEnv::new(env.clone()), rng.as_mut(), |_, _| {})
    });
    Ok(EvalStats {
        outcomes: outcomes.into_iter().collect::<Result<_>>()?,
    })
}
