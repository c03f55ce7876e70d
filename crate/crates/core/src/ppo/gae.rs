use super::Rollout;

/// Advantages and bootstrapped returns for one rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageSet {
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

/// Generalized advantage estimation, computed right to left:
/// `δ_t = r_t + γ V_{t+1} (1 − d_t) − V_t`, `A_t = δ_t + γλ (1 − d_t) A_{t+1}`.
pub fn compute_gae(rollout: &Rollout, gamma: f64, lam: f64) -> AdvantageSet {
    let n = rollout.len();
    let mut advantages = vec![0.0; n];
    let mut next_value = rollout.bootstrap_value;
    let mut next_adv = 0.0;
    for t in (0..n).rev() {
        let live = if rollout.dones[t] { 0.0 } else { 1.0 };
        let delta = rollout.rewards[t] + gamma * next_value * live - rollout.values[t];
        next_adv = delta + gamma * lam * live * next_adv;
        advantages[t] = next_adv;
        next_value = rollout.values[t];
    }
    let returns = advantages
        .iter()
        .zip(&rollout.values)
        .map(|(a, v)| a + v)
        .collect();
    AdvantageSet { advantages, returns }
}

/// Shifts to zero mean and scales to unit (population) standard deviation.
pub fn normalize_advantages(adv: &mut [f64]) {
    if adv.is_empty() {
        return;
    }
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let var = adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    for a in adv.iter_mut() {
        *a = (*a - mean) / (std + 1e-8);
    }
}
