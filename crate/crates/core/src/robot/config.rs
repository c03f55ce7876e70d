use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::error::{from_json_str, Error, Result};

/// Actuation type of one module. All axes are the local z axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    RevoluteZ,
    PrismaticZ,
}

/// One module of the chain: a joint followed by its rigid link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointSpec {
    pub kind: JointKind,
    /// Translation along local x after the joint, meters.
    pub link_length: f64,
    /// Translation along z after the joint, meters.
    pub link_rise: f64,
    pub limit_lo: f64,
    pub limit_hi: f64,
    pub max_velocity: f64,
}

impl JointSpec {
    pub fn revolute(link_length: f64, link_rise: f64, max_velocity: f64) -> Self {
        JointSpec {
            kind: JointKind::RevoluteZ,
            link_length,
            link_rise,
            limit_lo: -PI,
            limit_hi: PI,
            max_velocity,
        }
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.limit_lo, self.limit_hi)
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.limit_lo && value <= self.limit_hi
    }
}

/// Declarative description of a serial chain. The environment origin is the
/// robot base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    pub name: String,
    pub base_position: Vec3,
    pub base_rise: f64,
    pub joints: Vec<JointSpec>,
}

/// Joint speed of the presets, rad/s. Fast enough that a full-scale relative
/// command (0.1 rad) completes inside the shortest 1 ms execution window.
const PRESET_MAX_VELOCITY: f64 = 100.0;

/// Home-pose height of the 3-DoF preset; equals the z of its reaching target.
const SCARA_3DOF_HOME_Z: f64 = 0.3746;
/// Home-pose height of the 4-DoF preset.
const SCARA_4DOF_HOME_Z: f64 = 0.4868;

impl RobotConfig {
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    /// Three revolute modules with links of 0.35, 0.30 and 0.10 m.
    pub fn scara_3dof() -> Self {
        RobotConfig {
            name: "scara_3dof".into(),
            base_position: [0.0; 3],
            base_rise: SCARA_3DOF_HOME_Z,
            joints: vec![
                JointSpec::revolute(0.35, 0.0, PRESET_MAX_VELOCITY),
                JointSpec::revolute(0.30, 0.0, PRESET_MAX_VELOCITY),
                JointSpec::revolute(0.10, 0.0, PRESET_MAX_VELOCITY),
            ],
        }
    }

    /// The 3-DoF chain with a fourth revolute module appended distally. Its
    /// rise lifts the home pose to 0.4868 m.
    pub fn scara_4dof() -> Self {
        let mut cfg = Self::scara_3dof();
        cfg.name = "scara_4dof".into();
        cfg.joints.push(JointSpec::revolute(
            0.05,
            SCARA_4DOF_HOME_Z - SCARA_3DOF_HOME_Z,
            PRESET_MAX_VELOCITY,
        ));
        cfg
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "scara_3dof" => Some(Self::scara_3dof()),
            "scara_4dof" => Some(Self::scara_4dof()),
            _ => None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_robot_config(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.joints.is_empty() {
            return Err(Error::semantic("joints", "at least one joint is required"));
        }
        for (i, v) in self.base_position.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::semantic(format!("base_position[{i}]"), "must be finite"));
            }
        }
        if !self.base_rise.is_finite() {
            return Err(Error::semantic("base_rise", "must be finite"));
        }
        for (i, j) in self.joints.iter().enumerate() {
            let field = |name: &str| format!("joints[{i}].{name}");
            for (name, v) in [
                ("link_length", j.link_length),
                ("link_rise", j.link_rise),
                ("limit_lo", j.limit_lo),
                ("limit_hi", j.limit_hi),
                ("max_velocity", j.max_velocity),
            ] {
                if !v.is_finite() {
                    return Err(Error::semantic(field(name), "must be finite"));
                }
            }
            if j.link_length < 0.0 {
                return Err(Error::semantic(field("link_length"), "must be >= 0"));
            }
            if j.limit_lo >= j.limit_hi {
                return Err(Error::semantic(
                    field("limit_hi"),
                    format!("limit_hi ({}) must exceed limit_lo ({})", j.limit_hi, j.limit_lo),
                ));
            }
            if j.max_velocity <= 0.0 {
                return Err(Error::semantic(field("max_velocity"), "must be > 0"));
            }
        }
        Ok(())
    }

    /// Straight-line home pose reach in the plane.
    pub fn planar_reach(&self) -> f64 {
        self.joints.iter().map(|j| j.link_length).sum()
    }
}

/// Parses and validates a robot description from JSON text.
pub fn parse_robot_config(text: &str) -> Result<RobotConfig> {
    let cfg: RobotConfig = from_json_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}
