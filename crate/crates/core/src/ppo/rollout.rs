use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::nn::{sample_action, PolicyParams};
use crate::par::Exec;

/// Fixed-horizon batch of transitions from one environment.
///
/// `obs` holds the normalized network inputs actually fed to the policy, so
/// log-probabilities can be recomputed exactly during the update.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub obs: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    pub values: Vec<f64>,
    pub logprobs: Vec<f64>,
    /// Value estimate of the state following the last transition.
    pub bootstrap_value: f64,
}

impl Rollout {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub total_reward: f64,
    pub length: usize,
}

struct Worker<E> {
    env: E,
    rng: ChaCha8Rng,
    raw_obs: Vec<f64>,
    ep_return: f64,
    ep_len: usize,
}

struct StepOutcome {
    action: Vec<f64>,
    logprob: f64,
    reward: f64,
    done: bool,
    finished: Option<EpisodeRecord>,
}

/// Steps one or more environments in lock-step with a shared policy.
///
/// Each environment has its own sampling stream derived from the run seed,
/// so results do not depend on how environment steps are scheduled.
pub struct Collector<E> {
    workers: Vec<Worker<E>>,
    exec: Exec,
    finished: Vec<EpisodeRecord>,
}

/// Sampling stream for environment `index` of a run seeded with `seed`.
pub(crate) fn worker_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

impl<E: Environment> Collector<E> {
    /// Resets every environment and folds the initial observations into the
    /// normalizer.
    pub fn new(envs: Vec<E>, seed: u64, params: &mut PolicyParams, exec: Exec) -> Result<Self> {
        if envs.is_empty() {
            return Err(Error::Config("at least one environment is required".into()));
        }
        let mut workers = Vec::with_capacity(envs.len());
        for (i, mut env) in envs.into_iter().enumerate() {
            if env.observation_dim() != params.spec.input_dim || env.action_dim() != params.spec.action_dim {
                return Err(Error::Dimension {
                    expected: params.spec.input_dim,
                    actual: env.observation_dim(),
                });
            }
            let raw_obs = env.reset();
            params.obs_norm.update(&raw_obs);
            workers.push(Worker {
                env,
                rng: worker_rng(seed, i),
                raw_obs,
                ep_return: 0.0,
                ep_len: 0,
            });
        }
        Ok(Collector {
            workers,
            exec,
            finished: Vec::new(),
        })
    }

    pub fn n_envs(&self) -> usize {
        self.workers.len()
    }

    /// Episodes completed since the last call, in completion order.
    pub fn take_episodes(&mut self) -> Vec<EpisodeRecord> {
        std::mem::take(&mut self.finished)
    }

    fn normalized_inputs(&self, params: &PolicyParams) -> Array2<f64> {
        let dim = params.spec.input_dim;
        let mut x = Array2::zeros((self.workers.len(), dim));
        for (mut row, w) in x.rows_mut().into_iter().zip(&self.workers) {
            row.assign(&ndarray::ArrayView1::from(&params.obs_norm.normalize(&w.raw_obs)[..]));
        }
        x
    }

    /// Collects `steps` transitions from every environment. Finished episodes
    /// are reset immediately. The observation normalizer is updated between
    /// steps, never while environments are running.
    pub fn collect(&mut self, params: &mut PolicyParams, steps: usize) -> Result<Vec<Rollout>> {
        let n = self.workers.len();
        let (obs_dim, act_dim) = (params.spec.input_dim, params.spec.action_dim);
        let mut rollouts: Vec<Rollout> = (0..n)
            .map(|_| Rollout {
                obs: Array2::zeros((steps, obs_dim)),
                actions: Array2::zeros((steps, act_dim)),
                rewards: Vec::with_capacity(steps),
                dones: Vec::with_capacity(steps),
                values: Vec::with_capacity(steps),
                logprobs: Vec::with_capacity(steps),
                bootstrap_value: 0.0,
            })
            .collect();

        for t in 0..steps {
            let inputs = self.normalized_inputs(params);
            let cache = params.forward_batch(inputs.view())?;
            let means = cache.mean();
            let log_std = params.weights.log_std.as_slice().expect("contiguous");

            let outcomes = self.exec.map_mut(&mut self.workers, |i, w| -> Result<StepOutcome> {
                let mean = means.row(i);
                let (action, logprob) = sample_action(mean.as_slice().expect("row"), log_std, &mut w.rng);
                let tr = w.env.step(&action)?;
                w.ep_return += tr.reward;
                w.ep_len += 1;
                let finished = if tr.done {
                    let record = EpisodeRecord {
                        total_reward: w.ep_return,
                        length: w.ep_len,
                    };
                    w.ep_return = 0.0;
                    w.ep_len = 0;
                    w.raw_obs = w.env.reset();
                    Some(record)
                } else {
                    w.raw_obs = tr.observation;
                    None
                };
                Ok(StepOutcome {
                    action,
                    logprob,
                    reward: tr.reward,
                    done: tr.done,
                    finished,
                })
            });

            let values = cache.values();
            for (i, outcome) in outcomes.into_iter().enumerate() {
                let o = outcome?;
                let r = &mut rollouts[i];
                r.obs.row_mut(t).assign(&inputs.row(i));
                r.actions
                    .row_mut(t)
                    .assign(&ArrayView2::from_shape((1, act_dim), &o.action).expect("row").row(0));
                r.rewards.push(o.reward);
                r.dones.push(o.done);
                r.values.push(values[i]);
                r.logprobs.push(o.logprob);
                self.finished.extend(o.finished);
            }
            for w in &self.workers {
                params.obs_norm.update(&w.raw_obs);
            }
        }

        let inputs = self.normalized_inputs(params);
        let bootstrap = params.forward_batch(inputs.view())?.values();
        for (r, v) in rollouts.iter_mut().zip(bootstrap) {
            r.bootstrap_value = v;
        }
        Ok(rollouts)
    }
}

/// Single-environment collection of `horizon` transitions.
pub fn collect_rollout<E: Environment>(
    collector: &mut Collector<E>,
    params: &mut PolicyParams,
    horizon: usize,
) -> Result<Rollout> {
    if collector.n_envs() != 1 {
        return Err(Error::Config(format!(
            "collect_rollout expects one environment, collector has {}",
            collector.n_envs()
        )));
    }
    Ok(collector.collect(params, horizon)?.pop().expect("one rollout"))
}
