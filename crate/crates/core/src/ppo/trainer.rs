use std::collections::VecDeque;
use std::time::Instant;

use ndarray::{concatenate, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    clip_gradient_norm, compute_gae, loss_and_grad, normalize_advantages, Algorithm, Batch, Collector,
    EpisodeRecord, IterationLog, LogSink, LossConfig, LossStats, PpoHyper, Rollout,
};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::nn::{AdamConfig, AdamState, MlpSpec, PolicyParams};
use crate::par::Exec;

const EPISODE_WINDOW: usize = 100;

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: PolicyParams,
    pub iterations: usize,
    pub timesteps: usize,
    pub wall_clock_s: f64,
}

/// Rollouts from all environments flattened into one training batch.
struct FlatBatch {
    inputs: Array2<f64>,
    actions: Array2<f64>,
    logprobs: Vec<f64>,
    advantages: Vec<f64>,
    returns: Vec<f64>,
    values: Vec<f64>,
}

impl FlatBatch {
    fn new(rollouts: &[Rollout], hyper: &PpoHyper) -> Self {
        let mut advantages = Vec::new();
        let mut returns = Vec::new();
        for r in rollouts {
            let gae = compute_gae(r, hyper.gamma, hyper.lam);
            advantages.extend(gae.advantages);
            returns.extend(gae.returns);
        }
        let stack = |f: fn(&Rollout) -> &Array2<f64>| {
            let views: Vec<_> = rollouts.iter().map(|r| f(r).view()).collect();
            concatenate(Axis(0), &views).expect("equal widths")
        };
        FlatBatch {
            inputs: stack(|r| &r.obs),
            actions: stack(|r| &r.actions),
            logprobs: rollouts.iter().flat_map(|r| r.logprobs.iter().copied()).collect(),
            values: rollouts.iter().flat_map(|r| r.values.iter().copied()).collect(),
            advantages,
            returns,
        }
    }

    fn len(&self) -> usize {
        self.advantages.len()
    }

    fn select(&self, idx: &[usize]) -> FlatBatch {
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        FlatBatch {
            inputs: self.inputs.select(Axis(0), idx),
            actions: self.actions.select(Axis(0), idx),
            logprobs: pick(&self.logprobs),
            advantages: pick(&self.advantages),
            returns: pick(&self.returns),
            values: pick(&self.values),
        }
    }

    fn view(&self) -> Batch<'_> {
        Batch {
            inputs: self.inputs.view(),
            actions: self.actions.view(),
            logprobs_old: &self.logprobs,
            advantages: &self.advantages,
            returns: &self.returns,
            values_old: &self.values,
        }
    }
}

#[derive(Default)]
struct UpdateTotals {
    policy: f64,
    value: f64,
    steps: usize,
}

impl UpdateTotals {
    fn add(&mut self, s: &LossStats) {
        self.policy += s.policy;
        self.value += s.value;
        self.steps += 1;
    }
}

fn diverged(iteration: usize, message: impl Into<String>) -> Error {
    Error::Diverged {
        iteration,
        message: message.into(),
    }
}

fn gradient_step(
    params: &mut PolicyParams,
    adam: &mut AdamState,
    batch: &FlatBatch,
    cfg: &LossConfig,
    grad_clip: f64,
    exec: Exec,
    iteration: usize,
) -> Result<LossStats> {
    let (stats, mut grads) = loss_and_grad(params, &batch.view(), cfg, exec)?;
    if !stats.total.is_finite() {
        return Err(diverged(iteration, format!("non-finite loss {stats:?}")));
    }
    clip_gradient_norm(&mut grads, grad_clip);
    adam.step(&mut params.weights, &grads)
        .map_err(|e| diverged(iteration, e.to_string()))?;
    Ok(stats)
}

/// Trains with the selected variant. Environments are built by
/// `env_factory(index)`; ppo1 always uses a single environment.
pub fn train<E, F>(
    algorithm: Algorithm,
    env_factory: F,
    hyper: &PpoHyper,
    seed: u64,
    sinks: &mut [&mut dyn LogSink],
) -> Result<TrainOutcome>
where
    E: Environment,
    F: Fn(usize) -> Result<E>,
{
    hyper.validate()?;
    let start = Instant::now();
    let (n_envs, steps_per_env, exec) = match algorithm {
        Algorithm::Ppo1 => (1, hyper.horizon, Exec::Sequential),
        Algorithm::Ppo2 => (hyper.n_envs, hyper.steps_per_env(), hyper.exec),
    };
    let envs = (0..n_envs).map(&env_factory).collect::<Result<Vec<E>>>()?;
    let spec = MlpSpec {
        input_dim: envs[0].observation_dim(),
        hidden: hyper.hidden.clone(),
        action_dim: envs[0].action_dim(),
    };
    spec.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = PolicyParams::init(spec, &mut rng);
    let mut adam = AdamState::new(AdamConfig::with_lr(hyper.lr), &params.weights);
    let mut collector = Collector::new(envs, seed, &mut params, exec)?;
    let mut recent: VecDeque<EpisodeRecord> = VecDeque::with_capacity(EPISODE_WINDOW);

    let mut timesteps = 0;
    let mut iteration = 0;
    while timesteps < hyper.total_timesteps {
        iteration += 1;
        let rollouts = collector.collect(&mut params, steps_per_env)?;
        timesteps += n_envs * steps_per_env;
        for ep in collector.take_episodes() {
            if recent.len() == EPISODE_WINDOW {
                recent.pop_front();
            }
            recent.push_back(ep);
        }

        let mut batch = FlatBatch::new(&rollouts, hyper);
        let mut totals = UpdateTotals::default();
        match algorithm {
            Algorithm::Ppo1 => {
                normalize_advantages(&mut batch.advantages);
                let cfg = LossConfig {
                    clip_epsilon: hyper.clip_epsilon,
                    value_coef: hyper.value_coef,
                    entropy_coef: hyper.entropy_coef,
                    value_clip: None,
                };
                for _ in 0..hyper.epochs {
                    let s = gradient_step(&mut params, &mut adam, &batch, &cfg, f64::INFINITY, exec, iteration)?;
                    totals.add(&s);
                }
            }
            Algorithm::Ppo2 => {
                let cfg = LossConfig {
                    clip_epsilon: hyper.clip_epsilon,
                    value_coef: hyper.value_coef,
                    entropy_coef: hyper.entropy_coef,
                    value_clip: hyper.value_clip.then_some(hyper.clip_epsilon),
                };
                let mut order: Vec<usize> = (0..batch.len()).collect();
                for _ in 0..hyper.epochs {
                    order.shuffle(&mut rng);
                    for idx in order.chunks(hyper.minibatch_size) {
                        let mut mb = batch.select(idx);
                        normalize_advantages(&mut mb.advantages);
                        let s = gradient_step(&mut params, &mut adam, &mb, &cfg, hyper.grad_clip_norm, exec, iteration)?;
                        totals.add(&s);
                    }
                }
            }
        }
        if !params.weights.is_finite() {
            return Err(diverged(iteration, "non-finite parameters after update"));
        }

        let (mean_ep_reward, mean_ep_len) = if recent.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let k = recent.len() as f64;
            (
                recent.iter().map(|e| e.total_reward).sum::<f64>() / k,
                recent.iter().map(|e| e.length as f64).sum::<f64>() / k,
            )
        };
        let row = IterationLog {
            iteration,
            timesteps,
            mean_ep_reward,
            mean_ep_len,
            policy_loss: totals.policy / totals.steps as f64,
            value_loss: totals.value / totals.steps as f64,
            wall_clock_s: start.elapsed().as_secs_f64(),
        };
        for sink in sinks.iter_mut() {
            sink.record(&row)?;
        }
    }

    Ok(TrainOutcome {
        params,
        iterations: iteration,
        timesteps,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Single-environment, full-batch, multi-epoch PPO.
pub fn train_ppo1<E, F>(
    env_factory: F,
    hyper: &PpoHyper,
    seed: u64,
    sinks: &mut [&mut dyn LogSink],
) -> Result<TrainOutcome>
where
    E: Environment,
    F: Fn(usize) -> Result<E>,
{
    train(Algorithm::Ppo1, env_factory, hyper, seed, sinks)
}

/// Vectorized minibatch PPO with value clipping and gradient-norm clipping;
/// `hyper.n_envs` environments.
pub fn train_ppo2<E, F>(
    env_factory: F,
    hyper: &PpoHyper,
    seed: u64,
    sinks: &mut [&mut dyn LogSink],
) -> Result<TrainOutcome>
where
    E: Environment,
    F: Fn(usize) -> Result<E>,
{
    train(Algorithm::Ppo2, env_factory, hyper, seed, sinks)
}
