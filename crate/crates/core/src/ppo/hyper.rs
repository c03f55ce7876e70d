use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ppo1,
    Ppo2,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ppo1 => "ppo1",
            Algorithm::Ppo2 => "ppo2",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ppo1" => Ok(Algorithm::Ppo1),
            "ppo2" => Ok(Algorithm::Ppo2),
            other => Err(Error::Config(format!("unknown algorithm `{other}` (expected ppo1 or ppo2)"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// PPO hyperparameters. `horizon` is the number of transitions per update
/// batch; with `ppo2` it is split evenly across `n_envs` environments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoHyper {
    pub clip_epsilon: f64,
    pub gamma: f64,
    pub lam: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub lr: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
    /// Global gradient-norm bound, ppo2 only. `f64::INFINITY` disables it.
    pub grad_clip_norm: f64,
    /// Clip value predictions around the old estimates by `clip_epsilon`
    /// (ppo2 only).
    pub value_clip: bool,
    pub horizon: usize,
    pub total_timesteps: usize,
    pub n_envs: usize,
    pub hidden: Vec<usize>,
    pub exec: Exec,
}

impl Default for PpoHyper {
    fn default() -> Self {
        PpoHyper {
            clip_epsilon: 0.2,
            gamma: 0.99,
            lam: 0.95,
            epochs: 10,
            minibatch_size: 64,
            lr: 3e-4,
            value_coef: 0.5,
            entropy_coef: 0.0,
            grad_clip_norm: 0.5,
            value_clip: true,
            horizon: 2048,
            total_timesteps: 150_000,
            n_envs: 8,
            hidden: vec![64, 64],
            exec: Exec::default(),
        }
    }
}

impl PpoHyper {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return fail(format!("clip_epsilon must be in (0, 1), got {}", self.clip_epsilon));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("gamma must be in (0, 1], got {}", self.gamma));
        }
        if !(0.0..=1.0).contains(&self.lam) {
            return fail(format!("lam must be in [0, 1], got {}", self.lam));
        }
        if self.horizon == 0 || self.epochs == 0 || self.minibatch_size == 0 || self.n_envs == 0 {
            return fail("horizon, epochs, minibatch_size and n_envs must be >= 1".into());
        }
        if self.total_timesteps == 0 {
            return fail("total_timesteps must be >= 1".into());
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return fail(format!("lr must be a finite non-negative number, got {}", self.lr));
        }
        if self.grad_clip_norm.is_nan() || self.grad_clip_norm <= 0.0 {
            return fail(format!("grad_clip_norm must be > 0, got {}", self.grad_clip_norm));
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return fail("hidden layer widths must be >= 1".into());
        }
        Ok(())
    }

    /// Transitions each ppo2 environment contributes per update.
    pub fn steps_per_env(&self) -> usize {
        self.horizon.div_ceil(self.n_envs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let h = PpoHyper::default();
        h.validate().unwrap();
        assert_eq!(h.steps_per_env(), 256);
    }

    #[test]
    fn partial_overrides_parse() {
        let h: PpoHyper = serde_json::from_str(r#"{"lr": 0.001, "hidden": [8]}"#).unwrap();
        assert_eq!(h.lr, 0.001);
        assert_eq!(h.hidden, vec![8]);
        assert_eq!(h.horizon, 2048);
        assert!(serde_json::from_str::<PpoHyper>(r#"{"lr_typo": 1}"#).is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        for bad in [
            PpoHyper { clip_epsilon: 1.0, ..Default::default() },
            PpoHyper { gamma: 0.0, ..Default::default() },
            PpoHyper { lam: 1.5, ..Default::default() },
            PpoHyper { n_envs: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
