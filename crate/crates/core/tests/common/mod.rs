//! Independent reference implementations shared by the integration tests
//! and the acceptance suite.

#![allow(dead_code)]

use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use modubot_core::nn::{MlpSpec, PolicyParams};
use modubot_core::ppo::{loss_and_grad, Batch, LossConfig, Rollout};
use modubot_core::robot::{JointKind, JointSpec, RobotConfig};
use modubot_core::Exec;

pub fn random_robot<R: Rng>(rng: &mut R) -> RobotConfig {
    let dof = rng.random_range(1..=6);
    let joints = (0..dof)
        .map(|_| {
            let kind = if rng.random_bool(0.8) { JointKind::RevoluteZ } else { JointKind::PrismaticZ };
            let (lo, hi) = match kind {
                JointKind::RevoluteZ => (-rng.random_range(0.5..3.2), rng.random_range(0.5..3.2)),
                JointKind::PrismaticZ => (-rng.random_range(0.0..0.3), rng.random_range(0.05..0.3)),
            };
            JointSpec {
                kind,
                link_length: rng.random_range(0.0..0.6),
                link_rise: rng.random_range(-0.1..0.2),
                limit_lo: lo,
                limit_hi: hi,
                max_velocity: rng.random_range(0.5..10.0),
            }
        })
        .collect();
    RobotConfig {
        name: "random".into(),
        base_position: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5)],
        base_rise: rng.random_range(0.0..0.5),
        joints,
    }
}

pub fn random_q<R: Rng>(robot: &RobotConfig, rng: &mut R) -> Vec<f64> {
    robot.joints.iter().map(|j| rng.random_range(j.limit_lo..=j.limit_hi)).collect()
}

fn translation(x: f64, y: f64, z: f64) -> Matrix4<f64> {
    let mut t = Matrix4::identity();
    t[(0, 3)] = x;
    t[(1, 3)] = y;
    t[(2, 3)] = z;
    t
}

fn rot_z(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let mut t = Matrix4::identity();
    t[(0, 0)] = c;
    t[(0, 1)] = -s;
    t[(1, 0)] = s;
    t[(1, 1)] = c;
    t
}

/// End-effector position from a product of 4x4 homogeneous transforms.
pub fn fk_homogeneous(robot: &RobotConfig, q: &[f64]) -> [f64; 3] {
    let [bx, by, bz] = robot.base_position;
    let mut t = translation(bx, by, bz + robot.base_rise);
    for (j, &qi) in robot.joints.iter().zip(q) {
        let joint = match j.kind {
            JointKind::RevoluteZ => rot_z(qi),
            JointKind::PrismaticZ => translation(0.0, 0.0, qi),
        };
        t = t * joint * translation(j.link_length, 0.0, j.link_rise);
    }
    let p = t * Vector4::new(0.0, 0.0, 0.0, 1.0);
    [p[0], p[1], p[2]]
}

/// GAE as the explicit double sum
/// `A_t = Σ_{l≥0} (γλ)^l δ_{t+l}` truncated at the first episode end.
pub fn gae_double_sum(rewards: &[f64], values: &[f64], dones: &[bool], bootstrap: f64, gamma: f64, lam: f64) -> Vec<f64> {
    let n = rewards.len();
    let next_value = |t: usize| if t + 1 < n { values[t + 1] } else { bootstrap };
    let delta = |t: usize| {
        let live = if dones[t] { 0.0 } else { 1.0 };
        rewards[t] + gamma * live * next_value(t) - values[t]
    };
    (0..n)
        .map(|t| {
            let mut sum = 0.0;
            let mut weight = 1.0;
            for k in t..n {
                sum += weight * delta(k);
                if dones[k] {
                    break;
                }
                weight *= gamma * lam;
            }
            sum
        })
        .collect()
}

pub fn rollout_from(rewards: Vec<f64>, values: Vec<f64>, dones: Vec<bool>, bootstrap: f64) -> Rollout {
    let n = rewards.len();
    Rollout {
        obs: ndarray::Array2::zeros((n, 1)),
        actions: ndarray::Array2::zeros((n, 1)),
        rewards,
        dones,
        values,
        logprobs: vec![0.0; n],
        bootstrap_value: bootstrap,
    }
}

/// Owned data behind a loss [`Batch`].
pub struct BatchData {
    pub inputs: ndarray::Array2<f64>,
    pub actions: ndarray::Array2<f64>,
    pub logprobs_old: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
    pub values_old: Vec<f64>,
}

impl BatchData {
    pub fn batch(&self) -> Batch<'_> {
        Batch {
            inputs: self.inputs.view(),
            actions: self.actions.view(),
            logprobs_old: &self.logprobs_old,
            advantages: &self.advantages,
            returns: &self.returns,
            values_old: &self.values_old,
        }
    }
}

/// A random small network with perturbed log-std and a batch whose old
/// log-probabilities straddle the clip range.
pub fn random_problem<R: Rng>(rng: &mut R) -> (PolicyParams, BatchData) {
    let input = rng.random_range(1..6);
    let action = rng.random_range(1..4);
    let hidden: Vec<usize> = (0..rng.random_range(0..3)).map(|_| rng.random_range(1..7)).collect();
    let mut params = PolicyParams::init(MlpSpec::new(input, action).with_hidden(hidden), rng);
    for s in params.weights.log_std.iter_mut() {
        *s = rng.random_range(-1.0..0.5);
    }
    for t in params.weights.tensors_mut() {
        for w in t.iter_mut() {
            *w += rng.random_range(-0.3..0.3);
        }
    }
    let n = rng.random_range(5..40);
    let inputs = ndarray::Array2::from_shape_fn((n, input), |_| rng.random_range(-2.0..2.0));
    let actions = ndarray::Array2::from_shape_fn((n, action), |_| rng.random_range(-1.5..1.5));
    let cache = params.forward_batch(inputs.view()).unwrap();
    let log_std = params.weights.log_std.to_vec();
    let logprobs_old = (0..n)
        .map(|i| {
            let mean = cache.mean().row(i).to_vec();
            let a = actions.row(i).to_vec();
            modubot_core::nn::gaussian_log_prob(&a, &mean, &log_std) + rng.random_range(-0.4..0.4)
        })
        .collect();
    let values_old: Vec<f64> = cache.values().iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
    let data = BatchData {
        inputs,
        actions,
        logprobs_old,
        advantages: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        returns: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        values_old,
    };
    (params, data)
}

/// Largest `|a − n| / max(|a| + |n|, 1e-5)` between the analytic gradient
/// and central differences of the total loss.
pub fn gradient_check(params: &PolicyParams, data: &BatchData, cfg: &LossConfig, h: f64) -> f64 {
    let batch = data.batch();
    let (_, grads) = loss_and_grad(params, &batch, cfg, Exec::Sequential).unwrap();
    let analytic = grads.to_flat();
    let base = params.weights.to_flat();
    let mut probe = params.clone();
    let mut loss_at = |flat: &[f64]| {
        probe.weights.set_flat(flat);
        loss_and_grad(&probe, &batch, cfg, Exec::Sequential).unwrap().0.total
    };
    let mut worst = 0.0_f64;
    for k in 0..base.len() {
        let mut plus = base.clone();
        plus[k] += h;
        let mut minus = base.clone();
        minus[k] -= h;
        let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
        let a = analytic[k];
        let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-5);
        worst = worst.max(rel);
    }
    worst
}

#[derive(Debug, Default)]
pub struct FuzzReport {
    pub steps: usize,
    pub successes: usize,
    pub timeouts: usize,
}

/// Steps randomly configured reach environments for `samples` transitions,
/// checking the reward range, the sign rule, and both termination rules
/// against values recomputed from forward kinematics.
pub fn reward_contract_fuzz(samples: usize, seed: u64) -> Result<FuzzReport, String> {
    use modubot_core::env::{EnvConfig, ReachEnv};
    use modubot_core::robot::forward_kinematics;
    use rand::SeedableRng;
    use std::sync::Arc;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = FuzzReport::default();
    while report.steps < samples {
        let mut cfg = if rng.random_bool(0.5) { EnvConfig::scara_3dof(0.01) } else { EnvConfig::scara_4dof(0.001) };
        let dof = cfg.dof();
        let q_goal: Vec<f64> = (0..dof).map(|_| rng.random_range(-0.1..0.1)).collect();
        cfg.goal = forward_kinematics(&cfg.robot, &q_goal).unwrap().position;
        cfg.max_episode_steps = rng.random_range(1..=8);
        let noise = [0.0, 1e-3, 1e-2, 0.05, 0.3][rng.random_range(0..5)];
        let mut env = ReachEnv::new(Arc::new(cfg.clone()));
        env.reset();
        loop {
            let action: Vec<f64> = if rng.random_bool(0.5) {
                env.state()
                    .q
                    .iter()
                    .zip(&q_goal)
                    .map(|(q, g)| (g - q) / 0.1 + rng.random_range(-1.0..=1.0) * noise)
                    .collect()
            } else {
                (0..dof).map(|_| rng.random_range(-1.5..1.5)).collect()
            };
            let r = env.step(&action).map_err(|e| e.to_string())?;
            report.steps += 1;
            let p = forward_kinematics(&cfg.robot, &env.state().q).unwrap().position;
            let err = (p.iter().zip(&cfg.goal).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 3.0).sqrt();
            if (err - r.info.rmse).abs() > 1e-15 {
                return Err(format!("rmse {} vs oracle {err}", r.info.rmse));
            }
            if !(-1.0..=1.0).contains(&r.reward) {
                return Err(format!("reward {} out of range", r.reward));
            }
            if (r.reward > 0.0) != (err < 0.005) {
                return Err(format!("reward {} at rmse {err}", r.reward));
            }
            let success = err < 0.005;
            let timeout = env.state().steps_taken >= cfg.max_episode_steps;
            if r.done != (success || timeout) {
                return Err(format!("done {} at rmse {err}, step {}", r.done, env.state().steps_taken));
            }
            if r.done {
                if success {
                    report.successes += 1;
                } else {
                    report.timeouts += 1;
                }
                if env.step(&vec![0.0; dof]).is_ok() {
                    return Err("step accepted after episode end".into());
                }
                break;
            }
        }
    }
    Ok(report)
}

/// Trains ppo1 and ppo2 for one update at settings where ppo2 degenerates
/// to ppo1. Returns the largest parameter difference between the two and
/// the size of the ppo1 update.
pub fn variant_degeneracy(seed: u64, epochs: usize) -> (f64, f64) {
    use modubot_core::env::{EnvConfig, ReachEnv};
    use modubot_core::ppo::{train, Algorithm, PpoHyper};
    use rand::SeedableRng;
    use std::sync::Arc;

    let env = Arc::new(EnvConfig::scara_3dof(0.001));
    let hyper = PpoHyper {
        horizon: 512,
        total_timesteps: 512,
        epochs,
        n_envs: 1,
        minibatch_size: 512,
        value_clip: false,
        grad_clip_norm: f64::INFINITY,
        hidden: vec![32, 32],
        ..PpoHyper::default()
    };
    let run = |algorithm| {
        train(algorithm, |_| Ok(ReachEnv::new(env.clone())), &hyper, seed, &mut []).unwrap().params
    };
    let p1 = run(Algorithm::Ppo1);
    let p2 = run(Algorithm::Ppo2);
    assert_eq!(p1.obs_norm, p2.obs_norm);
    let spec = MlpSpec::new(env.observation_dim(), env.dof()).with_hidden(hyper.hidden.clone());
    let init = PolicyParams::init(spec, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    let (a, b, c) = (p1.weights.to_flat(), p2.weights.to_flat(), init.weights.to_flat());
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let update = a.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    (diff, update)
}
