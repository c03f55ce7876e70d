use std::path::Path;

use modubot_core::env::{euclid_mm, rmse, EnvConfig};
use modubot_core::harness::{
    cmd_eval, cmd_export_trajectory, cmd_sweep, cmd_train, load_env_for_eval, ExperimentConfig, RunMetadata,
    PER_SEED_HEADER, TABLE_HEADER,
};
use modubot_core::nn::{save_params, MlpSpec, PolicyParams};
use modubot_core::robot::forward_kinematics;
use modubot_core::Exec;

const TINY_HYPER: &str = r#"{"horizon": 512, "total_timesteps": 4096, "hidden": [16], "epochs": 2}"#;

fn tiny(dir: &Path, extra: &str) -> ExperimentConfig {
    with_hyper(dir, TINY_HYPER, extra)
}

fn with_hyper(dir: &Path, hyper: &str, extra: &str) -> ExperimentConfig {
    let text = format!(r#"{{"hyper": {hyper}, "eval_episodes": 3, "out_dir": "run" {extra}}}"#);
    ExperimentConfig::from_json(&text, dir).unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn train_writes_exactly_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path(), "");
    cmd_train(&cfg).unwrap();
    assert_eq!(listing(&cfg.out_dir), ["metadata.json", "params.bin", "train_log.csv"]);
}

#[test]
fn run_directory_reproduces_its_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path(), r#", "algorithm": "ppo2", "deterministic_eval": false, "seed": 12"#);
    let summary = cmd_train(&cfg).unwrap();
    let meta_path = cfg.out_dir.join("metadata.json");
    let meta = RunMetadata::load(&meta_path).unwrap();
    assert_eq!(meta.summary, summary);
    assert_eq!(meta.seed, 12);
    assert_eq!(meta.observation.len(), 12);
    let env = load_env_for_eval(&meta_path).unwrap();
    assert_eq!(env, cfg.resolve_env().unwrap());
    let row = cmd_eval(
        &cfg.out_dir.join("params.bin"),
        &env,
        Some(meta.algorithm),
        summary.eval.episodes,
        summary.eval_deterministic,
        summary.eval_seed,
        Exec::Sequential,
    )
    .unwrap();
    assert_eq!(row, summary.eval);
}

#[test]
fn identical_runs_write_identical_logs() {
    let read = |sub: &str| {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny(dir.path(), r#", "record_wall_clock": false"#);
        cfg.out_dir = dir.path().join(sub);
        cmd_train(&cfg).unwrap();
        std::fs::read(cfg.out_dir.join("train_log.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn zero_policy_evaluates_to_home_distance() {
    let dir = tempfile::tempdir().unwrap();
    let env = EnvConfig::scara_3dof(0.01);
    let params = PolicyParams::zeros(MlpSpec::new(env.observation_dim(), env.dof()));
    let path = dir.path().join("zero.bin");
    save_params(&params, &path).unwrap();
    let row = cmd_eval(&path, &env, None, 2, true, 0, Exec::Parallel).unwrap();
    let home = forward_kinematics(&env.robot, &[0.0; 3]).unwrap().position;
    let d = home.iter().zip(&env.goal).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() * 1000.0;
    assert!((row.mean_distance_mm - d).abs() < 1e-9);
    assert!((row.mean_distance_mm - euclid_mm(rmse(&home, &env.goal))).abs() < 1e-12);
    assert_eq!(row.std_distance_mm, 0.0);
    assert_eq!(row.success_rate, 0.0);

    let traj = dir.path().join("traj.csv");
    let rows = cmd_export_trajectory(&path, &env, &traj).unwrap();
    assert_eq!(rows.last().unwrap().distance_mm, row.mean_distance_mm);
    let text = std::fs::read_to_string(traj).unwrap();
    let data: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(data.len(), 1001);
    let tail = |l: &str| l.split(',').skip(5).collect::<Vec<_>>().join(",");
    assert!(data.iter().all(|l| tail(l) == tail(data[0])));
}

#[test]
fn sweep_continues_past_failed_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_hyper(
        dir.path(),
        r#"{"horizon": 256, "total_timesteps": 512, "hidden": [8], "lr": 1e300, "epochs": 2}"#,
        r#", "algorithms": ["ppo1"], "exec_times": [0.01, 0.001], "seeds": [0, 1]"#,
    );
    let table = cmd_sweep(&cfg).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.per_seed.len(), 4);
    assert!(table.per_seed.iter().all(|r| r.status.starts_with("diverged")), "{:?}", table.per_seed);
    let text = std::fs::read_to_string(cfg.out_dir.join("table_per_seed.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), PER_SEED_HEADER);
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sweep_table_shape() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = with_hyper(
        dir.path(),
        r#"{"horizon": 128, "total_timesteps": 256, "hidden": [8], "epochs": 1, "n_envs": 2, "minibatch_size": 64}"#,
        r#", "envs": ["scara_3dof", "scara_4dof"], "seeds": [3]"#,
    );
    cfg.eval_episodes = 1;
    let table = cmd_sweep(&cfg).unwrap();
    assert_eq!(table.rows.len(), 16);
    let text = std::fs::read_to_string(cfg.out_dir.join("table.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], TABLE_HEADER);
    assert!(lines[1].starts_with("3,ppo1,1.0,"));
    assert!(lines[16].starts_with("4,ppo2,0.001,"));
    for row in &table.rows {
        assert_eq!(row.episodes, 1);
        assert!(row.mean_distance_mm >= 0.0 && row.std_distance_mm == 0.0);
        assert!((0.0..=1.0).contains(&row.success_rate));
    }
}
