use serde::{Deserialize, Serialize};

use super::{JointKind, RobotConfig, Vec3};
use crate::error::{Error, Result};

/// End-effector position relative to the environment origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose3 {
    pub position: Vec3,
}

/// 3×n positional Jacobian stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub columns: Vec<Vec3>,
}

impl Jacobian {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }
}

fn check_joints(config: &RobotConfig, q: &[f64]) -> Result<()> {
    if q.len() != config.dof() {
        return Err(Error::Dimension {
            expected: config.dof(),
            actual: q.len(),
        });
    }
    for (i, (j, &v)) in config.joints.iter().zip(q).enumerate() {
        if !j.contains(v) {
            return Err(Error::OutOfLimits {
                joint: i,
                value: v,
                lo: j.limit_lo,
                hi: j.limit_hi,
            });
        }
    }
    Ok(())
}

/// Walks the chain, calling `visit(joint_index, joint_origin, heading)` before
/// each module's translation. Returns the end-effector position.
fn walk(config: &RobotConfig, q: &[f64], mut visit: impl FnMut(usize, Vec3)) -> Vec3 {
    let [bx, by, bz] = config.base_position;
    let mut p = [bx, by, bz + config.base_rise];
    let mut heading = 0.0_f64;
    for (i, (joint, &qi)) in config.joints.iter().zip(q).enumerate() {
        visit(i, p);
        let rise = match joint.kind {
            JointKind::RevoluteZ => {
                heading += qi;
                joint.link_rise
            }
            JointKind::PrismaticZ => joint.link_rise + qi,
        };
        let (s, c) = heading.sin_cos();
        p[0] += joint.link_length * c;
        p[1] += joint.link_length * s;
        p[2] += rise;
    }
    p
}

/// End-effector position for joint values `q`.
///
/// Each revolute module rotates the rest of the chain about its local z axis
/// and then translates by `(link_length, 0, link_rise)`; a prismatic module
/// adds its value to the rise instead.
pub fn forward_kinematics(config: &RobotConfig, q: &[f64]) -> Result<Pose3> {
    check_joints(config, q)?;
    Ok(Pose3 {
        position: walk(config, q, |_, _| {}),
    })
}

/// Analytic Jacobian of the end-effector position with respect to `q`.
pub fn jacobian(config: &RobotConfig, q: &[f64]) -> Result<Jacobian> {
    check_joints(config, q)?;
    let mut origins = Vec::with_capacity(q.len());
    let p = walk(config, q, |_, o| origins.push(o));
    let columns = config
        .joints
        .iter()
        .zip(&origins)
        .map(|(joint, o)| match joint.kind {
            // z × (p - o)
            JointKind::RevoluteZ => [-(p[1] - o[1]), p[0] - o[0], 0.0],
            JointKind::PrismaticZ => [0.0, 0.0, 1.0],
        })
        .collect();
    Ok(Jacobian { columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::JointSpec;
    use std::f64::consts::FRAC_PI_2;

    fn single(kind: JointKind, length: f64) -> RobotConfig {
        RobotConfig {
            name: "one".into(),
            base_position: [0.0; 3],
            base_rise: 0.0,
            joints: vec![JointSpec {
                kind,
                link_length: length,
                link_rise: 0.0,
                limit_lo: -1.0,
                limit_hi: 1.0,
                max_velocity: 1.0,
            }],
        }
    }

    #[test]
    fn zero_pose_is_straight_along_x() {
        let mut cfg = RobotConfig::scara_4dof();
        cfg.base_position = [0.1, -0.2, 0.05];
        let p = forward_kinematics(&cfg, &[0.0; 4]).unwrap().position;
        let reach: f64 = cfg.joints.iter().map(|j| j.link_length).sum();
        let rise: f64 = cfg.joints.iter().map(|j| j.link_rise).sum();
        assert!((p[0] - (0.1 + reach)).abs() < 1e-15);
        assert!((p[1] + 0.2).abs() < 1e-15);
        assert!((p[2] - (0.05 + cfg.base_rise + rise)).abs() < 1e-15);
    }

    #[test]
    fn home_heights_match_presets() {
        let p3 = forward_kinematics(&RobotConfig::scara_3dof(), &[0.0; 3]).unwrap();
        let p4 = forward_kinematics(&RobotConfig::scara_4dof(), &[0.0; 4]).unwrap();
        assert!((p3.position[2] - 0.3746).abs() < 1e-12);
        assert!((p4.position[2] - 0.4868).abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_of_base() {
        let cfg = RobotConfig::scara_3dof();
        let p = forward_kinematics(&cfg, &[FRAC_PI_2, 0.0, 0.0]).unwrap().position;
        assert!(p[0].abs() < 1e-12);
        assert!((p[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn revolute_column_is_circle_tangent() {
        let cfg = single(JointKind::RevoluteZ, 0.4);
        let jac = jacobian(&cfg, &[0.0]).unwrap();
        assert_eq!(jac.columns[0], [0.0, 0.4, 0.0]);
    }

    #[test]
    fn prismatic_column_is_z_axis() {
        let cfg = single(JointKind::PrismaticZ, 0.4);
        for q in [-0.5, 0.0, 0.9] {
            assert_eq!(jacobian(&cfg, &[q]).unwrap().columns[0], [0.0, 0.0, 1.0]);
        }
        let p = forward_kinematics(&cfg, &[0.25]).unwrap().position;
        assert_eq!(p, [0.4, 0.0, 0.25]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = RobotConfig::scara_3dof();
        assert!(matches!(
            forward_kinematics(&cfg, &[0.0; 2]),
            Err(Error::Dimension { expected: 3, actual: 2 })
        ));
        assert!(matches!(
            jacobian(&cfg, &[0.0, 4.0, 0.0]),
            Err(Error::OutOfLimits { joint: 1, .. })
        ));
    }
}
