mod common;

use modubot_core::ppo::compute_gae;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn recursion_matches_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.random_range(1..120);
        let rewards: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let p_done = rng.random_range(0.0..0.3);
        let dones: Vec<bool> = (0..n).map(|_| rng.random_bool(p_done)).collect();
        let bootstrap = rng.random_range(-5.0..5.0);
        let gamma = rng.random_range(0.8..=1.0);
        let lam = rng.random_range(0.0..=1.0);
        let oracle = common::gae_double_sum(&rewards, &values, &dones, bootstrap, gamma, lam);
        let rollout = common::rollout_from(rewards, values.clone(), dones, bootstrap);
        let got = compute_gae(&rollout, gamma, lam);
        for t in 0..n {
            assert!((got.advantages[t] - oracle[t]).abs() < 1e-10);
            assert!((got.returns[t] - (oracle[t] + values[t])).abs() < 1e-10);
        }
    }
}

#[test]
fn lambda_zero_is_one_step_td() {
    let rollout = common::rollout_from(vec![1.0, 0.5], vec![0.2, 0.4], vec![false, true], 9.0);
    let got = compute_gae(&rollout, 0.9, 0.0);
    assert!((got.advantages[0] - (1.0 + 0.9 * 0.4 - 0.2)).abs() < 1e-15);
    assert!((got.advantages[1] - (0.5 - 0.4)).abs() < 1e-15);
}
