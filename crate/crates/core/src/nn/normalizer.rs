use serde::{Deserialize, Serialize};

const INITIAL_COUNT: f64 = 1e-4;
const VAR_EPS: f64 = 1e-8;
pub const CLIP: f64 = 10.0;

/// Running per-feature mean and variance of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningNorm {
    pub count: f64,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl RunningNorm {
    pub fn new(dim: usize) -> Self {
        RunningNorm {
            count: INITIAL_COUNT,
            mean: vec![0.0; dim],
            var: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Folds one observation into the statistics (parallel-variance merge
    /// with a batch of size one).
    pub fn update(&mut self, x: &[f64]) {
        let total = self.count + 1.0;
        for ((m, v), &xi) in self.mean.iter_mut().zip(self.var.iter_mut()).zip(x) {
            let delta = xi - *m;
            *m += delta / total;
            *v = (*v * self.count + delta * delta * self.count / total) / total;
        }
        self.count = total;
    }

    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.var)
            .map(|((xi, m), v)| ((xi - m) / (v + VAR_EPS).sqrt()).clamp(-CLIP, CLIP))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_sample_moments() {
        let mut n = RunningNorm::new(2);
        let xs: Vec<[f64; 2]> = (0..1000).map(|i| [i as f64, 3.0 - 0.5 * (i % 7) as f64]).collect();
        for x in &xs {
            n.update(x);
        }
        let mean0 = xs.iter().map(|x| x[0]).sum::<f64>() / 1000.0;
        let var0 = xs.iter().map(|x| (x[0] - mean0).powi(2)).sum::<f64>() / 1000.0;
        assert!((n.mean[0] - mean0).abs() < 1e-3);
        assert!((n.var[0] - var0).abs() / var0 < 1e-3);
        let z = n.normalize(&[mean0, 3.0]);
        assert!(z[0].abs() < 1e-3);
    }

    #[test]
    fn constant_feature_normalizes_to_zero() {
        let mut n = RunningNorm::new(1);
        for _ in 0..50 {
            n.update(&[4.0]);
        }
        assert!(n.normalize(&[4.0])[0].abs() < 1e-2);
        assert_eq!(n.normalize(&[1e9])[0], CLIP);
    }
}
