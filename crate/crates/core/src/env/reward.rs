use super::EnvConfig;
use crate::robot::Vec3;

/// Root of the mean squared per-axis error, i.e. `‖p − g‖ / √3`.
pub fn rmse(p: &Vec3, g: &Vec3) -> f64 {
    let sq: f64 = p.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum();
    (sq / 3.0).sqrt()
}

/// Euclidean distance in millimeters corresponding to an rmse in meters.
pub fn euclid_mm(rmse_value: f64) -> f64 {
    rmse_value * 3f64.sqrt() * 1000.0
}

/// Piecewise-linear reward in `[-1, 1]`: positive strictly inside the success
/// radius, negative otherwise.
pub fn compute_reward(rmse_value: f64, cfg: &EnvConfig) -> f64 {
    if rmse_value < cfg.success_rmse {
        1.0 - rmse_value / cfg.success_rmse
    } else {
        -(rmse_value / cfg.reward_distance_scale).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_cases() {
        let g = [0.1, -0.2, 0.3];
        assert_eq!(rmse(&g, &g), 0.0);
        let p = [0.103, -0.197, 0.303];
        assert!((rmse(&p, &g) - 0.003).abs() < 1e-12);
        let p = [0.1 + 0.005 * 3f64.sqrt(), -0.2, 0.3];
        assert!((rmse(&p, &g) - 0.005).abs() < 1e-12);
        assert!((euclid_mm(0.005) - 8.660254037844386).abs() < 1e-9);
    }

    #[test]
    fn reward_branches() {
        let cfg = EnvConfig::scara_3dof(0.001);
        assert_eq!(compute_reward(0.0, &cfg), 1.0);
        assert_eq!(compute_reward(1.0, &cfg), -1.0);
        assert_eq!(compute_reward(7.5, &cfg), -1.0);
        assert!((compute_reward(0.0025, &cfg) - 0.5).abs() < 1e-15);
        // the threshold itself is a failure
        assert!(compute_reward(0.005, &cfg) < 0.0);
        assert!(compute_reward(0.0049999, &cfg) > 0.0);
    }
}
