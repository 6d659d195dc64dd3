//! Solution checks and objective evaluators that do not depend on any model.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Path, Vertex, UNREACHABLE};
use crate::instance::{MmcrInstance, MppInstance, RcpInstance, RcpVariant};
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PathCount {
        expected: usize,
        found: usize,
    },
    LengthMismatch {
        robot: usize,
    },
    WrongStart {
        robot: usize,
    },
    InvalidMove {
        robot: usize,
        t: usize,
    },
    VertexCollision {
        t: usize,
        robots: (usize, usize),
        vertex: Vertex,
    },
    EdgeSwap {
        t: usize,
        robots: (usize, usize),
    },
    TooFewAtGoal {
        reached: usize,
        required: usize,
    },
    UnknownObstacle {
        index: usize,
    },
    Blocked {
        robot: usize,
    },
    WrongGoal {
        robot: usize,
    },
    OverBudget {
        cost: f64,
        budget: f64,
    },
    DwellWithoutVisit {
        vertex: Vertex,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PathCount { expected, found } => {
                write!(f, "expected {expected} paths, found {found}")
            }
            Violation::LengthMismatch { robot } => {
                write!(f, "path of robot {robot} has a different length")
            }
            Violation::WrongStart { robot } => {
                write!(f, "robot {robot} does not start at its start vertex")
            }
            Violation::InvalidMove { robot, t } => {
                write!(f, "robot {robot} makes an invalid move at step {t}")
            }
            Violation::VertexCollision { t, robots, vertex } => {
                write!(
                    f,
                    "robots {} and {} both occupy vertex {vertex} at step {t}",
                    robots.0, robots.1
                )
            }
            Violation::EdgeSwap { t, robots } => {
                write!(
                    f,
                    "robots {} and {} swap along an edge at step {t}",
                    robots.0, robots.1
                )
            }
            Violation::TooFewAtGoal { reached, required } => {
                write!(f, "only {reached} robots at goals, {required} required")
            }
            Violation::UnknownObstacle { index } => {
                write!(f, "obstacle index {index} does not exist")
            }
            Violation::Blocked { robot } => write!(f, "robot {robot} has no obstacle-free route"),
            Violation::WrongGoal { robot } => {
                write!(f, "robot {robot} does not end at an allowed goal")
            }
            Violation::OverBudget { cost, budget } => {
                write!(f, "cost {cost} exceeds budget {budget}")
            }
            Violation::DwellWithoutVisit { vertex } => {
                write!(f, "dwell time at unvisited vertex {vertex}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Number of robots whose final vertex is a goal of their group. Within a
/// group the goals form a set, so any member on any group goal counts.
pub fn robots_at_goals(instance: &MppInstance, finals: &[Vertex]) -> usize {
    instance
        .units()
        .iter()
        .map(|members| {
            let goals: Vec<Vertex> = members.iter().map(|&r| instance.goals[r]).collect();
            let mut ends: Vec<Vertex> = members
                .iter()
                .map(|&r| finals[r])
                .filter(|v| goals.contains(v))
                .collect();
            ends.sort_unstable();
            ends.dedup();
            ends.len()
        })
        .sum()
}

pub fn validate_mpp_solution(instance: &MppInstance, solution: &Solution) -> Verdict {
    let mut out = Vec::new();
    let paths = &solution.paths;
    let n = instance.robot_count();
    if paths.len() != n {
        out.push(Violation::PathCount {
            expected: n,
            found: paths.len(),
        });
        return Verdict { violations: out };
    }
    if n == 0 {
        return Verdict::default();
    }
    let len = paths[0].vertices.len();
    for (r, p) in paths.iter().enumerate() {
        if p.vertices.len() != len || len == 0 {
            out.push(Violation::LengthMismatch { robot: r });
        }
    }
    if !out.is_empty() {
        return Verdict { violations: out };
    }
    let g = &instance.graph;
    for (r, p) in paths.iter().enumerate() {
        if p.vertices[0] != instance.starts[r] {
            out.push(Violation::WrongStart { robot: r });
        }
        for t in 1..len {
            let (a, b) = (p.vertices[t - 1], p.vertices[t]);
            if a >= g.vertex_count() || b >= g.vertex_count() || (a != b && !g.has_edge(a, b)) {
                out.push(Violation::InvalidMove { robot: r, t });
            }
        }
    }
    for t in 0..len {
        for i in 0..n {
            for j in i + 1..n {
                let (pi, pj) = (&paths[i].vertices, &paths[j].vertices);
                if pi[t] == pj[t] {
                    out.push(Violation::VertexCollision {
                        t,
                        robots: (i, j),
                        vertex: pi[t],
                    });
                }
                if t > 0 && pi[t - 1] != pi[t] && pi[t - 1] == pj[t] && pi[t] == pj[t - 1] {
                    out.push(Violation::EdgeSwap { t, robots: (i, j) });
                }
            }
        }
    }
    let finals: Vec<Vertex> = paths.iter().map(|p| p.vertices[len - 1]).collect();
    let reached = robots_at_goals(instance, &finals);
    if reached < instance.k {
        out.push(Violation::TooFewAtGoal {
            reached,
            required: instance.k,
        });
    }
    Verdict { violations: out }
}

/// Vertices outside every obstacle not listed in `removed`.
pub fn free_vertices(instance: &MmcrInstance, removed: &[usize]) -> Vec<bool> {
    let mut free = vec![true; instance.graph.vertex_count()];
    for (i, o) in instance.obstacles.iter().enumerate() {
        if !removed.contains(&i) {
            for &v in o {
                free[v] = false;
            }
        }
    }
    free
}

/// Checks that every robot has a start-to-goal route avoiding the kept
/// obstacles. Reports the first blocked robot.
pub fn validate_mmcr_solution(instance: &MmcrInstance, solution: &Solution) -> Verdict {
    let mut out = Vec::new();
    for &i in &solution.removed_obstacles {
        if i >= instance.obstacles.len() {
            out.push(Violation::UnknownObstacle { index: i });
        }
    }
    if !out.is_empty() {
        return Verdict { violations: out };
    }
    let free = free_vertices(instance, &solution.removed_obstacles);
    for r in 0..instance.robot_count() {
        let (s, g) = (instance.starts[r], instance.goals[r]);
        let dist = instance.graph.distances_filtered(&[s], |v| free[v]);
        if !free[s] || !free[g] || dist[g] == UNREACHABLE {
            out.push(Violation::Blocked { robot: r });
            break;
        }
    }
    Verdict { violations: out }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcpEvaluation {
    pub reward: f64,
    pub cost: f64,
}

/// Reward and cost of a walk with dwell times (dwell may be empty, meaning
/// zero everywhere). Reward problems grant `r_i` for every visited vertex plus
/// `r_j / |N(j)|` for every pair of a visited `i` and an unvisited neighbor
/// `j`. Tourist problems grant `a_i * t_i` and charge the dwell as cost.
pub fn evaluate_rcp(instance: &RcpInstance, path: &Path, dwell: &[f64]) -> Result<RcpEvaluation> {
    let g = &instance.graph;
    if path.vertices.is_empty() || !path.is_valid_in(g) {
        return Err(Error::Invalid("walk is not valid in the graph".into()));
    }
    let n = g.vertex_count();
    if !dwell.is_empty() && dwell.len() != n {
        return Err(Error::Invalid(format!(
            "{} dwell times for {n} vertices",
            dwell.len()
        )));
    }
    let mut visited = vec![false; n];
    for &v in &path.vertices {
        visited[v] = true;
    }
    for (v, &t) in dwell.iter().enumerate() {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::Invalid(format!(
                "dwell time at vertex {v} must be finite and non-negative"
            )));
        }
        if t != 0.0 && !visited[v] {
            return Err(Error::Invalid(format!(
                "dwell time at unvisited vertex {v}"
            )));
        }
    }
    let moves: f64 = path
        .vertices
        .windows(2)
        .map(|w| instance.cost(w[0], w[1]))
        .sum();
    Ok(match &instance.variant {
        RcpVariant::Qcop { rewards } => {
            let mut reward = 0.0;
            for i in (0..n).filter(|&i| visited[i]) {
                reward += rewards[i];
                for &j in g.neighbors(i) {
                    if !visited[j] {
                        reward += rewards[j] / g.degree(j) as f64;
                    }
                }
            }
            RcpEvaluation {
                reward,
                cost: moves,
            }
        }
        RcpVariant::Otp { rates } => {
            let reward = dwell.iter().zip(rates).map(|(t, a)| t * a).sum();
            RcpEvaluation {
                reward,
                cost: moves + dwell.iter().sum::<f64>(),
            }
        }
    })
}

/// Endpoint, budget and dwell-support checks for a reward-problem solution.
pub fn validate_rcp_solution(instance: &RcpInstance, solution: &Solution) -> Verdict {
    let mut out = Vec::new();
    let Some(path) = solution.paths.first() else {
        return Verdict {
            violations: vec![Violation::PathCount {
                expected: 1,
                found: 0,
            }],
        };
    };
    if path.vertices.is_empty() || !path.is_valid_in(&instance.graph) {
        out.push(Violation::InvalidMove { robot: 0, t: 0 });
        return Verdict { violations: out };
    }
    let (first, last) = (path.vertices[0], *path.vertices.last().unwrap());
    if !instance.starts.contains(&first) {
        out.push(Violation::WrongStart { robot: 0 });
    }
    if !instance.goals.contains(&last) || (instance.is_otp() && first != last) {
        out.push(Violation::WrongGoal { robot: 0 });
    }
    match evaluate_rcp(instance, path, &solution.dwell_times) {
        Ok(e) if e.cost > instance.budget + 1e-9 => out.push(Violation::OverBudget {
            cost: e.cost,
            budget: instance.budget,
        }),
        Ok(_) => {}
        Err(_) => {
            let visited: Vec<Vertex> = path.vertices.clone();
            for (v, &t) in solution.dwell_times.iter().enumerate() {
                if t != 0.0 && !visited.contains(&v) {
                    out.push(Violation::DwellWithoutVisit { vertex: v });
                }
            }
        }
    }
    Verdict { violations: out }
}
