//! Brute-force reference solvers. They share nothing with the model builders
//! and are deliberately naive.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Path, Vertex};
use crate::instance::{MmcrInstance, MppInstance, RcpInstance, RcpVariant};
use crate::validate::evaluate_rcp;

/// Default cap on the number of joint states explored by [`mpp_oracle`].
pub const MPP_STATE_CAP: usize = 2_000_000;
/// Default cap on obstacles for [`mmcr_oracle`].
pub const MMCR_OBSTACLE_CAP: usize = 20;
/// Default cap on walks explored by [`rcp_oracle`].
pub const RCP_WALK_CAP: usize = 5_000_000;

/// Breadth-first search over joint configurations. Returns the smallest
/// makespan at which at least `k` robots sit on their goals, or `None` if no
/// such configuration is reachable within `max_t` steps.
pub fn mpp_oracle(instance: &MppInstance, max_t: usize) -> Result<Option<usize>> {
    mpp_oracle_capped(instance, max_t, MPP_STATE_CAP)
}

pub fn mpp_oracle_capped(
    instance: &MppInstance,
    max_t: usize,
    cap: usize,
) -> Result<Option<usize>> {
    instance.validate()?;
    let n = instance.robot_count();
    let units = instance.units();
    // interchangeable robots: store their positions sorted
    let canon = |state: &mut Vec<Vertex>| {
        for u in units.iter().filter(|u| u.len() > 1) {
            let mut pos: Vec<Vertex> = u.iter().map(|&r| state[r]).collect();
            pos.sort_unstable();
            for (&r, p) in u.iter().zip(pos) {
                state[r] = p;
            }
        }
    };
    let at_goals = |state: &[Vertex]| -> usize {
        units
            .iter()
            .map(|u| {
                u.iter()
                    .filter(|&&r| u.iter().any(|&q| instance.goals[q] == state[r]))
                    .count()
            })
            .sum()
    };
    let mut start = instance.starts.clone();
    canon(&mut start);
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    for t in 0..=max_t {
        if frontier.iter().any(|s| at_goals(s) >= instance.k) {
            return Ok(Some(t));
        }
        if t == max_t || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for state in &frontier {
            let mut succ = Vec::new();
            expand(instance, state, 0, &mut vec![0; n], &mut succ);
            for mut s in succ {
                canon(&mut s);
                if seen.insert(s.clone()) {
                    if seen.len() > cap {
                        return Err(Error::OracleCap(format!("more than {cap} joint states")));
                    }
                    next.push(s);
                }
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// All collision-free simultaneous moves from `state`, robot by robot.
fn expand(
    instance: &MppInstance,
    state: &[Vertex],
    r: usize,
    partial: &mut Vec<Vertex>,
    out: &mut Vec<Vec<Vertex>>,
) {
    if r == state.len() {
        out.push(partial.clone());
        return;
    }
    let g = &instance.graph;
    let here = state[r];
    for next in std::iter::once(here).chain(g.neighbors(here).iter().copied()) {
        let clash = (0..r).any(|q| {
            partial[q] == next || (next != here && partial[q] == here && state[q] == next)
        });
        if !clash {
            partial[r] = next;
            expand(instance, state, r + 1, partial, out);
        }
    }
}

fn connected_avoiding(instance: &MmcrInstance, blocked: &[bool], s: Vertex, g: Vertex) -> bool {
    if blocked[s] || blocked[g] {
        return false;
    }
    let graph = &instance.graph;
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(v) = queue.pop_front() {
        if v == g {
            return true;
        }
        for &w in graph.neighbors(v) {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Smallest number of obstacles whose removal connects every robot's start to
/// its goal, by enumerating subsets in ascending size.
pub fn mmcr_oracle(instance: &MmcrInstance) -> Result<usize> {
    Ok(mmcr_oracle_set(instance)?.len())
}

/// A lexicographically first minimum removal set.
pub fn mmcr_oracle_set(instance: &MmcrInstance) -> Result<Vec<usize>> {
    instance.validate()?;
    let m = instance.obstacles.len();
    if m > MMCR_OBSTACLE_CAP {
        return Err(Error::OracleCap(format!(
            "{m} obstacles exceed the cap of {MMCR_OBSTACLE_CAP}"
        )));
    }
    let n = instance.graph.vertex_count();
    for size in 0..=m {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let mut blocked = vec![false; n];
            for (i, obs) in instance.obstacles.iter().enumerate() {
                if !subset.contains(&i) {
                    for &v in obs {
                        blocked[v] = true;
                    }
                }
            }
            if (0..instance.robot_count()).all(|r| {
                connected_avoiding(instance, &blocked, instance.starts[r], instance.goals[r])
            }) {
                return Ok(subset);
            }
            if !next_combination(&mut subset, m) {
                break;
            }
        }
    }
    Err(Error::Invalid(
        "some robot cannot reach its goal even with every obstacle removed".into(),
    ))
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Best reward over all walks of at most `max_moves` moves from a start to a
/// goal within budget (closed walks for the tourist variant). Tourist dwell
/// time goes entirely to the best-rate visited vertex.
pub fn rcp_oracle(instance: &RcpInstance, max_moves: usize) -> Result<Option<RcpOracleResult>> {
    instance.validate()?;
    let mut best: Option<RcpOracleResult> = None;
    let mut count = 0usize;
    for &s in &instance.starts {
        let mut walk = vec![s];
        dfs_walks(instance, &mut walk, 0.0, max_moves, &mut best, &mut count)?;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcpOracleResult {
    pub reward: f64,
    pub walk: Path,
    pub dwell: Vec<f64>,
}

fn dfs_walks(
    instance: &RcpInstance,
    walk: &mut Vec<Vertex>,
    cost: f64,
    moves_left: usize,
    best: &mut Option<RcpOracleResult>,
    count: &mut usize,
) -> Result<()> {
    *count += 1;
    if *count > RCP_WALK_CAP {
        return Err(Error::OracleCap(format!("more than {RCP_WALK_CAP} walks")));
    }
    let here = *walk.last().unwrap();
    let closed = !instance.is_otp() || here == walk[0];
    if instance.goals.contains(&here) && closed {
        let path = Path::new(walk.clone());
        let dwell = match &instance.variant {
            RcpVariant::Qcop { .. } => Vec::new(),
            RcpVariant::Otp { rates } => {
                let mut dwell = vec![0.0; instance.graph.vertex_count()];
                let top =
                    walk.iter()
                        .copied()
                        .fold(walk[0], |a, v| if rates[v] > rates[a] { v } else { a });
                dwell[top] = (instance.budget - cost).max(0.0);
                dwell
            }
        };
        let reward = evaluate_rcp(instance, &path, &dwell)?.reward;
        if best.as_ref().is_none_or(|b| reward > b.reward + 1e-12) {
            *best = Some(RcpOracleResult {
                reward,
                walk: path,
                dwell,
            });
        }
    }
    if moves_left == 0 {
        return Ok(());
    }
    for &w in instance.graph.neighbors(here) {
        let c = cost + instance.cost(here, w);
        if c <= instance.budget + 1e-9 {
            walk.push(w);
            dfs_walks(instance, walk, c, moves_left - 1, best, count)?;
            walk.pop();
        }
    }
    Ok(())
}
