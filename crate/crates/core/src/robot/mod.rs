//! Modular serial-chain description and kinematics.

mod config;
mod kinematics;

pub use config::{parse_robot_config, JointKind, JointSpec, RobotConfig};
pub use kinematics::{forward_kinematics, jacobian, Jacobian, Pose3};

/// Cartesian 3-vector in meters.
pub type Vec3 = [f64; 3];
