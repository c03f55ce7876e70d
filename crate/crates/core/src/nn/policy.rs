use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dense, Mlp, MlpCache, RunningNorm};
use crate::error::{Error, Result};

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;

const HIDDEN_GAIN: f64 = std::f64::consts::SQRT_2;
const POLICY_OUT_GAIN: f64 = 0.01;
const VALUE_OUT_GAIN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub action_dim: usize,
}

impl MlpSpec {
    pub fn new(input_dim: usize, action_dim: usize) -> Self {
        MlpSpec {
            input_dim,
            hidden: vec![64, 64],
            action_dim,
        }
    }

    pub fn with_hidden(mut self, hidden: Vec<usize>) -> Self {
        self.hidden = hidden;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.action_dim == 0 || self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::Config(format!("network dimensions must be >= 1: {self:?}")));
        }
        Ok(())
    }

    fn sizes(&self, output: usize) -> Vec<usize> {
        let mut sizes = vec![self.input_dim];
        sizes.extend(&self.hidden);
        sizes.push(output);
        sizes
    }
}

/// Trainable tensors: separate policy and value networks plus the
/// state-independent action log-std. Gradients use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub policy: Mlp,
    pub value: Mlp,
    pub log_std: Array1<f64>,
}

impl Weights {
    pub fn zeros(spec: &MlpSpec) -> Self {
        Weights {
            policy: Mlp::zeros(&spec.sizes(spec.action_dim)),
            value: Mlp::zeros(&spec.sizes(1)),
            log_std: Array1::zeros(spec.action_dim),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let zero_mlp = |m: &Mlp| Mlp {
            layers: m
                .layers
                .iter()
                .map(|l| Dense::zeros(l.inputs(), l.outputs()))
                .collect(),
        };
        Weights {
            policy: zero_mlp(&self.policy),
            value: zero_mlp(&self.value),
            log_std: Array1::zeros(self.log_std.len()),
        }
    }

    /// Every tensor as a flat slice, in declaration order: policy layers,
    /// value layers, log-std.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = self.policy.tensors().collect();
        out.extend(self.value.tensors());
        out.push(self.log_std.as_slice().expect("contiguous"));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = self.policy.tensors_mut().collect();
        out.extend(self.value.tensors_mut());
        out.push(self.log_std.as_slice_mut().expect("contiguous"));
        out
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.tensors().into_iter().flatten().copied().collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut it = flat.iter();
        for t in self.tensors_mut() {
            for v in t.iter_mut() {
                *v = *it.next().expect("flat vector long enough");
            }
        }
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, scale: f64, other: &Weights) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors()
            .into_iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().into_iter().flatten().all(|v| v.is_finite())
    }
}

/// Everything needed to act: network spec, weights, and observation
/// normalizer statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub spec: MlpSpec,
    pub weights: Weights,
    pub obs_norm: RunningNorm,
}

/// Forward activations of both networks for one batch.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub policy: MlpCache,
    pub value: MlpCache,
}

impl ForwardCache {
    pub fn mean(&self) -> &Array2<f64> {
        self.policy.output()
    }

    pub fn values(&self) -> Array1<f64> {
        self.value.output().column(0).to_owned()
    }

    pub fn batch_len(&self) -> usize {
        self.mean().nrows()
    }
}

impl PolicyParams {
    pub fn zeros(spec: MlpSpec) -> Self {
        PolicyParams {
            weights: Weights::zeros(&spec),
            obs_norm: RunningNorm::new(spec.input_dim),
            spec,
        }
    }

    /// Orthogonal initialization with √2 gain on hidden layers, 0.01 on the
    /// policy output and 1.0 on the value output. log-std starts at 0.
    pub fn init<R: Rng + ?Sized>(spec: MlpSpec, rng: &mut R) -> Self {
        let build = |out: usize, out_gain: f64, rng: &mut R| {
            let sizes = spec.sizes(out);
            let last = sizes.len() - 2;
            Mlp {
                layers: sizes
                    .windows(2)
                    .enumerate()
                    .map(|(l, w)| {
                        let gain = if l == last { out_gain } else { HIDDEN_GAIN };
                        Dense::orthogonal(w[0], w[1], gain, rng)
                    })
                    .collect(),
            }
        };
        let policy = build(spec.action_dim, POLICY_OUT_GAIN, rng);
        let value = build(1, VALUE_OUT_GAIN, rng);
        PolicyParams {
            weights: Weights {
                policy,
                value,
                log_std: Array1::zeros(spec.action_dim),
            },
            obs_norm: RunningNorm::new(spec.input_dim),
            spec,
        }
    }

    fn check_input(&self, width: usize) -> Result<()> {
        if width != self.spec.input_dim {
            return Err(Error::Dimension {
                expected: self.spec.input_dim,
                actual: width,
            });
        }
        Ok(())
    }

    /// Batched forward pass on already-normalized inputs (one row each).
    pub fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<ForwardCache> {
        self.check_input(inputs.ncols())?;
        Ok(ForwardCache {
            policy: self.weights.policy.forward(inputs),
            value: self.weights.value.forward(inputs),
        })
    }

    /// Action mean and state value for a single normalized input.
    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_input(input.len())?;
        let x = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
        let cache = self.forward_batch(x)?;
        Ok((cache.mean().row(0).to_vec(), cache.value.output()[[0, 0]]))
    }

    /// Normalizes a raw observation with the current statistics.
    pub fn normalize(&self, raw: &[f64]) -> Result<Vec<f64>> {
        self.check_input(raw.len())?;
        Ok(self.obs_norm.normalize(raw))
    }

    /// Deterministic action (the policy mean) for a raw observation.
    pub fn act_deterministic(&self, raw: &[f64]) -> Result<Vec<f64>> {
        let x = self.normalize(raw)?;
        Ok(self.forward(&x)?.0)
    }

    /// Reverse pass through both networks.
    ///
    /// `d_mean` (batch × action_dim) and `d_value` (batch) are loss gradients
    /// with respect to the network outputs; `d_log_std` is the direct
    /// gradient on the log-std vector. Network gradients are summed over the
    /// batch.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        d_mean: ArrayView2<f64>,
        d_value: &Array1<f64>,
        d_log_std: &Array1<f64>,
    ) -> Result<Weights> {
        let n = cache.batch_len();
        if d_mean.dim() != (n, self.spec.action_dim) {
            return Err(Error::Dimension {
                expected: n * self.spec.action_dim,
                actual: d_mean.len(),
            });
        }
        if d_value.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: d_value.len(),
            });
        }
        if d_log_std.len() != self.spec.action_dim {
            return Err(Error::Dimension {
                expected: self.spec.action_dim,
                actual: d_log_std.len(),
            });
        }
        let d_value = d_value.view().insert_axis(Axis(1));
        Ok(Weights {
            policy: self.weights.policy.backward(&cache.policy, d_mean),
            value: self.weights.value.backward(&cache.value, d_value),
            log_std: d_log_std.clone(),
        })
    }
}

/// Diagonal Gaussian log-density in nats.
pub fn gaussian_log_prob(action: &[f64], mean: &[f64], log_std: &[f64]) -> f64 {
    let half_log_2pi = 0.5 * (2.0 * PI).ln();
    action
        .iter()
        .zip(mean)
        .zip(log_std)
        .map(|((a, m), s)| {
            let z = (a - m) / s.exp();
            -0.5 * z * z - s - half_log_2pi
        })
        .sum()
}

/// Samples `mean + exp(log_std) ⊙ z` with `z ~ N(0, I)` and returns the
/// action with its log-probability.
pub fn sample_action<R: Rng + ?Sized>(mean: &[f64], log_std: &[f64], rng: &mut R) -> (Vec<f64>, f64) {
    let action: Vec<f64> = mean
        .iter()
        .zip(log_std)
        .map(|(m, s)| {
            let z: f64 = rng.sample(StandardNormal);
            m + s.exp() * z
        })
        .collect();
    let logp = gaussian_log_prob(&action, mean, log_std);
    (action, logp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_outputs_zero() {
        let p = PolicyParams::zeros(MlpSpec::new(5, 2));
        let (mean, value) = p.forward(&[0.3, -1.0, 2.0, 0.0, 7.0]).unwrap();
        assert_eq!(mean, vec![0.0, 0.0]);
        assert_eq!(value, 0.0);
    }

    #[test]
    fn batch_matches_single_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = PolicyParams::init(MlpSpec::new(4, 3), &mut rng);
        let x = Array2::from_shape_fn((6, 4), |(i, j)| ((i * 4 + j) as f64).sin());
        let cache = p.forward_batch(x.view()).unwrap();
        for i in 0..6 {
            let (m, v) = p.forward(x.row(i).as_slice().unwrap()).unwrap();
            assert_eq!(m.as_slice(), cache.mean().row(i).as_slice().unwrap());
            assert_eq!(v, cache.values()[i]);
        }
        assert!(p.forward(&[0.0; 3]).is_err());
    }

    #[test]
    fn standard_normal_log_density() {
        let lp = gaussian_log_prob(&[0.0], &[0.0], &[0.0]);
        assert!((lp + 0.9189385332046727).abs() < 1e-15);
    }

    #[test]
    fn tiny_std_samples_the_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, _) = sample_action(&[0.4, -0.2], &[LOG_STD_MIN; 2], &mut rng);
        assert!((a[0] - 0.4).abs() < 1e-7 && (a[1] + 0.2).abs() < 1e-7);
    }

    #[test]
    fn mode_has_highest_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mean = [0.1, 0.5, -0.3];
        let log_std = [-0.5, 0.0, 0.3];
        let at_mode = gaussian_log_prob(&mean, &mean, &log_std);
        for _ in 0..200 {
            let (a, lp) = sample_action(&mean, &log_std, &mut rng);
            assert!(lp <= at_mode);
            assert_eq!(lp, gaussian_log_prob(&a, &mean, &log_std));
        }
    }

    #[test]
    fn fresh_value_output_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for seed in 0..20 {
            let p = PolicyParams::init(MlpSpec::new(12, 3), &mut ChaCha8Rng::seed_from_u64(seed));
            for _ in 0..20 {
                let mut x: Vec<f64> = (0..12).map(|_| rng.sample(StandardNormal)).collect();
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter_mut().for_each(|v| *v /= norm);
                let (_, v) = p.forward(&x).unwrap();
                assert!(v.abs() < 10.0);
            }
        }
    }
}
