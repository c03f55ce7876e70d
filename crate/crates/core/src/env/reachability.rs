//! Coarse joint-space search used to check that a goal can be reached.

use super::rmse;
use crate::robot::{forward_kinematics, jacobian, RobotConfig, Vec3};

/// Best configuration found for a goal.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachSearch {
    pub q: Vec<f64>,
    pub rmse: f64,
}

const GRID_BUDGET: f64 = 20_000.0;
const CANDIDATES: usize = 8;
const REFINE_ITERS: usize = 200;
const DAMPING: f64 = 1e-2;

/// Samples a uniform joint grid, then polishes the best few samples with
/// damped least squares while respecting joint limits.
pub fn search_reaching_configuration(robot: &RobotConfig, goal: &Vec3) -> ReachSearch {
    let n = robot.dof();
    let per_joint = (GRID_BUDGET.powf(1.0 / n as f64).floor() as usize).clamp(3, 64);
    let total = per_joint.pow(n as u32);

    let mut best: Vec<ReachSearch> = Vec::with_capacity(CANDIDATES + 1);
    let mut q = vec![0.0; n];
    for index in 0..total {
        let mut rest = index;
        for (qi, joint) in q.iter_mut().zip(&robot.joints) {
            let k = rest % per_joint;
            rest /= per_joint;
            let span = joint.limit_hi - joint.limit_lo;
            *qi = joint.limit_lo + (k as f64 + 0.5) * span / per_joint as f64;
        }
        let p = forward_kinematics(robot, &q).expect("grid point inside limits").position;
        let err = rmse(&p, goal);
        if best.len() < CANDIDATES || err < best[best.len() - 1].rmse {
            let pos = best.partition_point(|c| c.rmse <= err);
            best.insert(pos, ReachSearch { q: q.clone(), rmse: err });
            best.truncate(CANDIDATES);
        }
    }

    best.into_iter()
        .map(|c| refine(robot, goal, c))
        .min_by(|a, b| a.rmse.total_cmp(&b.rmse))
        .expect("at least one candidate")
}

fn refine(robot: &RobotConfig, goal: &Vec3, start: ReachSearch) -> ReachSearch {
    let mut current = start;
    for _ in 0..REFINE_ITERS {
        let p = forward_kinematics(robot, &current.q).unwrap().position;
        let e = [goal[0] - p[0], goal[1] - p[1], goal[2] - p[2]];
        let jac = jacobian(robot, &current.q).unwrap();
        // (J Jᵀ + λ² I) y = e, then Δq = Jᵀ y
        let mut a = [[0.0; 3]; 3];
        for (r, row) in a.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = jac.columns.iter().map(|col| col[r] * col[c]).sum::<f64>();
            }
            row[r] += DAMPING * DAMPING;
        }
        let Some(y) = solve3(&a, &e) else { break };
        let candidate: Vec<f64> = jac
            .columns
            .iter()
            .zip(&current.q)
            .zip(&robot.joints)
            .map(|((col, qi), joint)| {
                joint.clamp(qi + col[0] * y[0] + col[1] * y[1] + col[2] * y[2])
            })
            .collect();
        let p = forward_kinematics(robot, &candidate).unwrap().position;
        let err = rmse(&p, goal);
        if err >= current.rmse {
            break;
        }
        current = ReachSearch { q: candidate, rmse: err };
    }
    current
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut x = [0.0; 3];
    for (c, xc) in x.iter_mut().enumerate() {
        let mut m = *a;
        for r in 0..3 {
            m[r][c] = b[r];
        }
        *xc = det(&m) / d;
    }
    Some(x)
}
