use ndarray::{s, Array1, Array2, ArrayView2};

use crate::error::Result;
use crate::nn::{gaussian_log_prob, PolicyParams, Weights};
use crate::par::Exec;

/// Rows processed per gradient chunk. Chunk boundaries are fixed so the
/// summation order, and hence the result, is identical in sequential and
/// parallel execution.
const CHUNK_ROWS: usize = 128;

/// Clipped surrogate loss `−mean(min(r·A, clip(r, 1−ε, 1+ε)·A))` with
/// `r = exp(logp_new − logp_old)`.
pub fn ppo_clip_loss(logp_new: &[f64], logp_old: &[f64], adv: &[f64], clip_epsilon: f64) -> f64 {
    let n = adv.len() as f64;
    let total: f64 = logp_new
        .iter()
        .zip(logp_old)
        .zip(adv)
        .map(|((new, old), a)| {
            let r = (new - old).exp();
            let clipped = r.clamp(1.0 - clip_epsilon, 1.0 + clip_epsilon);
            (r * a).min(clipped * a)
        })
        .sum();
    -total / n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub clip_epsilon: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
    /// Clip range for value predictions around the old estimates.
    pub value_clip: Option<f64>,
}

/// Training batch. Advantages are used as given (normalize beforehand).
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub inputs: ArrayView2<'a, f64>,
    pub actions: ArrayView2<'a, f64>,
    pub logprobs_old: &'a [f64],
    pub advantages: &'a [f64],
    pub returns: &'a [f64],
    pub values_old: &'a [f64],
}

impl Batch<'_> {
    pub fn len(&self) -> usize {
        self.advantages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.advantages.is_empty()
    }

    fn rows(&self, lo: usize, hi: usize) -> Batch<'_> {
        Batch {
            inputs: self.inputs.slice(s![lo..hi, ..]),
            actions: self.actions.slice(s![lo..hi, ..]),
            logprobs_old: &self.logprobs_old[lo..hi],
            advantages: &self.advantages[lo..hi],
            returns: &self.returns[lo..hi],
            values_old: &self.values_old[lo..hi],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossStats {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    /// Fraction of samples whose ratio fell outside the clip range.
    pub clip_fraction: f64,
}

struct ChunkResult {
    policy_sum: f64,
    value_sum: f64,
    clipped: usize,
    grads: Weights,
}

fn chunk_loss(params: &PolicyParams, batch: &Batch<'_>, cfg: &LossConfig) -> Result<ChunkResult> {
    let n = batch.len();
    let cache = params.forward_batch(batch.inputs)?;
    let means = cache.mean();
    let values = cache.values();
    let log_std = params.weights.log_std.as_slice().expect("contiguous");
    let inv_var: Vec<f64> = log_std.iter().map(|s| (-2.0 * s).exp()).collect();
    let act_dim = log_std.len();

    let mut d_mean = Array2::<f64>::zeros((n, act_dim));
    let mut d_value = Array1::<f64>::zeros(n);
    let mut d_log_std = Array1::<f64>::zeros(act_dim);
    let (mut policy_sum, mut value_sum, mut clipped) = (0.0, 0.0, 0usize);
    let (lo, hi) = (1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);

    for i in 0..n {
        let mean = means.row(i);
        let action = batch.actions.row(i);
        let mean = mean.as_slice().expect("row");
        let action_owned;
        let action = match action.as_slice() {
            Some(a) => a,
            None => {
                action_owned = action.to_vec();
                &action_owned
            }
        };
        let logp = gaussian_log_prob(action, mean, log_std);
        let ratio = (logp - batch.logprobs_old[i]).exp();
        let adv = batch.advantages[i];
        let unclipped = ratio * adv;
        let clipped_term = ratio.clamp(lo, hi) * adv;
        policy_sum -= unclipped.min(clipped_term);
        if ratio < lo || ratio > hi {
            clipped += 1;
        }
        // d(−min)/d logp: the clipped branch is constant in the parameters.
        let d_logp = if unclipped <= clipped_term { -unclipped } else { 0.0 };
        if d_logp != 0.0 {
            for j in 0..act_dim {
                let diff = action[j] - mean[j];
                d_mean[[i, j]] = d_logp * diff * inv_var[j];
                d_log_std[j] += d_logp * (diff * diff * inv_var[j] - 1.0);
            }
        }

        let v = values[i];
        let ret = batch.returns[i];
        let (loss, grad) = match cfg.value_clip {
            None => ((v - ret).powi(2), 2.0 * (v - ret)),
            Some(eps) => {
                let v_old = batch.values_old[i];
                let delta = v - v_old;
                let v_clipped = v_old + delta.clamp(-eps, eps);
                let plain = (v - ret).powi(2);
                let clip = (v_clipped - ret).powi(2);
                if plain >= clip {
                    (plain, 2.0 * (v - ret))
                } else {
                    let inside = if delta.abs() < eps { 1.0 } else { 0.0 };
                    (clip, 2.0 * (v_clipped - ret) * inside)
                }
            }
        };
        value_sum += loss;
        d_value[i] = cfg.value_coef * grad;
    }

    let grads = params.backward(&cache, d_mean.view(), &d_value, &d_log_std)?;
    Ok(ChunkResult {
        policy_sum,
        value_sum,
        clipped,
        grads,
    })
}

/// Total PPO loss `clip + value_coef·value − entropy_coef·entropy` over a
/// batch and its exact gradient with respect to every trainable tensor.
pub fn loss_and_grad(
    params: &PolicyParams,
    batch: &Batch<'_>,
    cfg: &LossConfig,
    exec: Exec,
) -> Result<(LossStats, Weights)> {
    let n = batch.len();
    let chunks = n.div_ceil(CHUNK_ROWS);
    let results = exec.map_range(chunks, |c| {
        let lo = c * CHUNK_ROWS;
        let hi = (lo + CHUNK_ROWS).min(n);
        chunk_loss(params, &batch.rows(lo, hi), cfg)
    });

    let mut grads = params.weights.zeros_like();
    let (mut policy_sum, mut value_sum, mut clipped) = (0.0, 0.0, 0usize);
    for r in results {
        let r = r?;
        grads.add_scaled(1.0, &r.grads);
        policy_sum += r.policy_sum;
        value_sum += r.value_sum;
        clipped += r.clipped;
    }
    let inv_n = 1.0 / n as f64;
    grads.scale(inv_n);

    let half_log_2pi_e = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    let entropy: f64 = params.weights.log_std.iter().map(|s| s + half_log_2pi_e).sum();
    grads.log_std.mapv_inplace(|g| g - cfg.entropy_coef);

    let policy = policy_sum * inv_n;
    let value = value_sum * inv_n;
    let stats = LossStats {
        total: policy + cfg.value_coef * value - cfg.entropy_coef * entropy,
        policy,
        value,
        entropy,
        clip_fraction: clipped as f64 * inv_n,
    };
    Ok((stats, grads))
}

/// Rescales `grads` so its global norm is at most `max_norm`; returns the
/// norm before clipping.
pub fn clip_gradient_norm(grads: &mut Weights, max_norm: f64) -> f64 {
    let norm = grads.global_norm();
    if max_norm.is_finite() && norm > max_norm {
        grads.scale(max_norm / norm);
    }
    norm
}
