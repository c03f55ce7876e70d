use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::reachability::search_reaching_configuration;
use crate::error::{from_json_str, Error, Result};
use crate::robot::{RobotConfig, Vec3};

/// Center of the target letter for the 3-DoF preset, meters from the base.
pub const GOAL_3DOF: Vec3 = [0.3305805, -0.1326121, 0.3746];
/// Same target for the 4-DoF preset, raised to its working height.
pub const GOAL_4DOF: Vec3 = [0.3305805, -0.1326121, 0.4868];

/// Per-step command scale, either one value for every joint or one per joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionScale {
    Uniform(f64),
    PerJoint(Vec<f64>),
}

impl ActionScale {
    pub fn get(&self, joint: usize) -> f64 {
        match self {
            ActionScale::Uniform(v) => *v,
            ActionScale::PerJoint(v) => v[joint],
        }
    }
}

/// A robot given inline, by preset name, or by path to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RobotSource {
    Named(String),
    Inline(RobotConfig),
}

impl RobotSource {
    pub fn resolve(&self, base_dir: &Path) -> Result<RobotConfig> {
        match self {
            RobotSource::Inline(cfg) => {
                cfg.validate()?;
                Ok(cfg.clone())
            }
            RobotSource::Named(name) => {
                let path = base_dir.join(name);
                if path.is_file() {
                    return RobotConfig::load(path);
                }
                RobotConfig::preset(name).ok_or_else(|| {
                    Error::Config(format!(
                        "robot `{name}` is neither a preset nor a readable file"
                    ))
                })
            }
        }
    }
}

fn default_success_rmse() -> f64 {
    0.005
}
fn default_max_episode_steps() -> usize {
    1000
}
fn default_substep_dt() -> f64 {
    0.001
}
fn default_action_scale() -> ActionScale {
    ActionScale::Uniform(0.1)
}
fn default_reward_distance_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvConfigFile {
    robot: RobotSource,
    goal: Vec3,
    #[serde(default = "default_success_rmse")]
    success_rmse: f64,
    #[serde(default = "default_max_episode_steps")]
    max_episode_steps: usize,
    exec_time: f64,
    #[serde(default = "default_substep_dt")]
    substep_dt: f64,
    #[serde(default = "default_action_scale")]
    action_scale: ActionScale,
    #[serde(default = "default_reward_distance_scale")]
    reward_distance_scale: f64,
}

/// Fully resolved environment configuration. Serializes with the robot
/// inline, so the output can be parsed back without external files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub robot: RobotConfig,
    pub goal: Vec3,
    pub success_rmse: f64,
    pub max_episode_steps: usize,
    /// Trajectory execution time per action, seconds.
    pub exec_time: f64,
    pub substep_dt: f64,
    pub action_scale: ActionScale,
    pub reward_distance_scale: f64,
}

impl EnvConfig {
    fn preset(robot: RobotConfig, goal: Vec3, exec_time: f64) -> Self {
        EnvConfig {
            robot,
            goal,
            success_rmse: default_success_rmse(),
            max_episode_steps: default_max_episode_steps(),
            exec_time,
            substep_dt: default_substep_dt(),
            action_scale: default_action_scale(),
            reward_distance_scale: default_reward_distance_scale(),
        }
    }

    pub fn scara_3dof(exec_time: f64) -> Self {
        Self::preset(RobotConfig::scara_3dof(), GOAL_3DOF, exec_time)
    }

    pub fn scara_4dof(exec_time: f64) -> Self {
        Self::preset(RobotConfig::scara_4dof(), GOAL_4DOF, exec_time)
    }

    /// Parses an environment document; relative robot paths resolve against
    /// `base_dir`. The result is validated.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let file: EnvConfigFile = from_json_str(text)?;
        let cfg = EnvConfig {
            robot: file.robot.resolve(base_dir)?,
            goal: file.goal,
            success_rmse: file.success_rmse,
            max_episode_steps: file.max_episode_steps,
            exec_time: file.exec_time,
            substep_dt: file.substep_dt,
            action_scale: file.action_scale,
            reward_distance_scale: file.reward_distance_scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, &base)
    }

    pub fn dof(&self) -> usize {
        self.robot.dof()
    }

    /// Length of the flattened observation: q, qdot, end-effector, offset.
    pub fn observation_dim(&self) -> usize {
        2 * self.dof() + 6
    }

    /// Number of integration substeps per action, at least one.
    pub fn substeps(&self) -> usize {
        ((self.exec_time / self.substep_dt).round() as usize).max(1)
    }

    /// Checks every invariant, including reachability of the goal.
    pub fn validate(&self) -> Result<()> {
        self.robot.validate()?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::semantic(name, format!("must be a positive number, got {v}")))
            }
        };
        positive("success_rmse", self.success_rmse)?;
        positive("exec_time", self.exec_time)?;
        positive("substep_dt", self.substep_dt)?;
        positive("reward_distance_scale", self.reward_distance_scale)?;
        if self.exec_time < self.substep_dt {
            return Err(Error::semantic(
                "exec_time",
                format!(
                    "exec_time ({}) must be at least substep_dt ({})",
                    self.exec_time, self.substep_dt
                ),
            ));
        }
        if self.max_episode_steps == 0 {
            return Err(Error::semantic("max_episode_steps", "must be >= 1"));
        }
        match &self.action_scale {
            ActionScale::Uniform(v) => positive("action_scale", *v)?,
            ActionScale::PerJoint(v) => {
                if v.len() != self.dof() {
                    return Err(Error::semantic(
                        "action_scale",
                        format!("expected {} entries, got {}", self.dof(), v.len()),
                    ));
                }
                for (i, s) in v.iter().enumerate() {
                    positive(&format!("action_scale[{i}]"), *s)?;
                }
            }
        }
        if self.goal.iter().any(|v| !v.is_finite()) {
            return Err(Error::semantic("goal", "must be finite"));
        }
        let found = search_reaching_configuration(&self.robot, &self.goal);
        if found.rmse >= self.success_rmse {
            return Err(Error::Unreachable {
                goal: self.goal,
                best_rmse: found.rmse,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        EnvConfig::scara_3dof(0.001).validate().unwrap();
        EnvConfig::scara_4dof(1.0).validate().unwrap();
    }

    #[test]
    fn parses_with_defaults_and_preset_robot() {
        let text = r#"{"robot": "scara_4dof", "goal": [0.3305805, -0.1326121, 0.4868], "exec_time": 0.01}"#;
        let cfg = EnvConfig::from_json(text, Path::new(".")).unwrap();
        assert_eq!(cfg, EnvConfig::scara_4dof(0.01));
        assert_eq!(cfg.substeps(), 10);
    }

    #[test]
    fn inline_round_trip() {
        let cfg = EnvConfig::scara_3dof(0.1);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(EnvConfig::from_json(&text, Path::new(".")).unwrap(), cfg);
    }

    #[test]
    fn robot_path_resolves_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        let robot = serde_json::to_string(&RobotConfig::scara_3dof()).unwrap();
        std::fs::write(dir.path().join("arm.json"), robot).unwrap();
        let env = format!(
            r#"{{"robot": "arm.json", "goal": {:?}, "exec_time": 1.0}}"#,
            GOAL_3DOF
        );
        std::fs::write(dir.path().join("env.json"), env).unwrap();
        let cfg = EnvConfig::load(dir.path().join("env.json")).unwrap();
        assert_eq!(cfg.robot, RobotConfig::scara_3dof());
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = EnvConfig::scara_3dof(0.0005);
        assert!(matches!(cfg.validate(), Err(Error::Semantic { .. })));
        cfg.exec_time = 0.01;
        cfg.goal = [2.0, 0.0, 0.3746];
        assert!(matches!(cfg.validate(), Err(Error::Unreachable { .. })));
        cfg.goal = [0.3, 0.1, 0.5];
        assert!(matches!(cfg.validate(), Err(Error::Unreachable { .. })));

        let text = r#"{"robot": "scara_3dof", "goal": [0,0,0], "exec_time": 0.01, "gravity": 9.8}"#;
        assert!(matches!(
            EnvConfig::from_json(text, Path::new(".")),
            Err(Error::Schema { .. })
        ));
        let text = r#"{"robot": "nope", "goal": [0,0,0], "exec_time": 0.01}"#;
        assert!(matches!(
            EnvConfig::from_json(text, Path::new(".")),
            Err(Error::Config(_))
        ));
    }
}
