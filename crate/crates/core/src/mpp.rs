//! Minimum-makespan multi-robot path planning on time-expanded graphs.
//!
//! The horizon starts at a lower bound and grows one step at a time until the
//! model becomes feasible. Copies far from each robot's shortest path can be
//! pruned (tube or sphere heuristics); when a pruned model is infeasible the
//! unpruned model at the same horizon is tried before moving on.

use std::collections::HashMap;
use std::time::Instant;

use crate::encoding::{
    add_time_unit, reachable_copies, Reachability, TimeExpandedEncoding, TimeUnit, UnitSpec,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, Path, Vertex, UNREACHABLE};
use crate::instance::MppInstance;
use crate::model::{IpModel, ObjectiveSense, Sense, VarId};
use crate::solution::{Solution, SolutionStats};
use crate::solver::{solve_with_backend, NodeOrder, SolveConfig, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    None,
    /// Keep copies within this distance of any vertex of the reference path.
    Tube(usize),
    /// Keep copies within this distance of the reference vertex assigned to
    /// the copy's layer.
    Sphere(usize),
}

/// Where robots that need not reach their goal may end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialEnds {
    /// Any vertex reachable within the horizon.
    Anywhere,
    /// Any vertex within this distance of the robot's goal(s).
    Neighborhood(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MppConfig {
    pub heuristic: Heuristic,
    pub fallback_to_exact: bool,
    /// Largest horizon tried. Defaults to the lower bound plus `2|V|`.
    pub max_t: Option<usize>,
    pub partial_ends: PartialEnds,
    /// Keep rows implied by the others (single-term rows, rows touching a
    /// single robot).
    pub keep_redundant: bool,
    /// Also forbid opposite feedback edges between the same two vertices, and
    /// add the corresponding rows for feedback self-edges.
    pub literal_feedback_collisions: bool,
    pub solver: SolveConfig,
}

impl Default for MppConfig {
    fn default() -> Self {
        Self {
            heuristic: Heuristic::None,
            fallback_to_exact: true,
            max_t: None,
            partial_ends: PartialEnds::Anywhere,
            keep_redundant: false,
            literal_feedback_collisions: false,
            solver: SolveConfig {
                node_order: NodeOrder::DepthFirst,
                ..SolveConfig::default()
            },
        }
    }
}

/// Per-robot shortest paths ignoring the other robots.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePaths {
    pub paths: Vec<Path>,
}

impl ReferencePaths {
    pub fn compute(instance: &MppInstance) -> Result<Self> {
        let paths = (0..instance.robot_count())
            .map(|r| {
                instance
                    .graph
                    .shortest_path(instance.starts[r], instance.goals[r])
                    .map(Path::new)
                    .ok_or(Error::Unreachable { robot: r })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { paths })
    }
}

/// Lower bound on the makespan: the longest shortest path when every robot
/// must arrive, otherwise the k-th smallest. Members of a group count the
/// distance to the nearest goal of the group, and the group as a whole needs
/// every goal covered.
pub fn underestimate_t(instance: &MppInstance) -> Result<usize> {
    instance.validate()?;
    let g = &instance.graph;
    let n = instance.robot_count();
    if n == 0 {
        return Ok(0);
    }
    let mut per_robot = vec![0; n];
    let mut group_bound = 0;
    for unit in instance.units() {
        let goals: Vec<Vertex> = unit.iter().map(|&r| instance.goals[r]).collect();
        let starts: Vec<Vertex> = unit.iter().map(|&r| instance.starts[r]).collect();
        let to_goals = g.distances_from(&goals);
        for &r in &unit {
            if to_goals[instance.starts[r]] == UNREACHABLE {
                return Err(Error::Unreachable { robot: r });
            }
            per_robot[r] = to_goals[instance.starts[r]];
        }
        if unit.len() > 1 {
            let from_starts = g.distances_from(&starts);
            group_bound = group_bound.max(goals.iter().map(|&v| from_starts[v]).max().unwrap_or(0));
        }
    }
    if instance.k == n {
        Ok(per_robot.into_iter().max().unwrap_or(0).max(group_bound))
    } else {
        per_robot.sort_unstable();
        Ok(per_robot[instance.k - 1])
    }
}

/// Copies kept by the tube heuristic, independent of the layer.
pub fn tube_mask(graph: &Graph, reference: &[&Path], h: usize, horizon: usize) -> Vec<Vec<bool>> {
    let sources: Vec<Vertex> = reference
        .iter()
        .flat_map(|p| p.vertices.iter().copied())
        .collect();
    let dist = graph.distances_from(&sources);
    let layer: Vec<bool> = dist.iter().map(|&d| d <= h).collect();
    vec![layer; horizon + 1]
}

/// Anchor index of layer `t` on a reference path of `len` vertices.
pub fn sphere_anchor(t: usize, len: usize, horizon: usize) -> usize {
    if horizon == 0 {
        return 0;
    }
    (t * len / horizon).min(len - 1)
}

/// Copies kept by the sphere heuristic.
pub fn sphere_mask(graph: &Graph, reference: &[&Path], h: usize, horizon: usize) -> Vec<Vec<bool>> {
    let n = graph.vertex_count();
    let mut cache: HashMap<Vertex, Vec<usize>> = HashMap::new();
    (0..=horizon)
        .map(|t| {
            let mut layer = vec![false; n];
            for p in reference {
                let anchor = p.vertices[sphere_anchor(t, p.vertices.len(), horizon)];
                let dist = cache
                    .entry(anchor)
                    .or_insert_with(|| graph.distances_from(&[anchor]));
                for v in 0..n {
                    layer[v] |= dist[v] <= h;
                }
            }
            layer
        })
        .collect()
}

/// Time-expanded MPP model at a fixed horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct MppModel {
    pub encoding: TimeExpandedEncoding,
    /// Feedback variables whose end is a goal of their flow.
    pub goal_feedback: Vec<VarId>,
}

impl MppModel {
    pub fn model(&self) -> &IpModel {
        &self.encoding.model
    }
}

fn unit_ends(instance: &MppInstance, goals: &[Vertex], partial: PartialEnds) -> Vec<Vertex> {
    let g = &instance.graph;
    if instance.k == instance.robot_count() {
        return goals.to_vec();
    }
    match partial {
        PartialEnds::Anywhere => (0..g.vertex_count()).collect(),
        PartialEnds::Neighborhood(radius) => {
            let d = g.distances_from(goals);
            (0..g.vertex_count()).filter(|&v| d[v] <= radius).collect()
        }
    }
}

/// Builds the model for horizon `horizon`. `pruning` restricts the copies of
/// every robot on top of reachability.
pub fn build_mpp_model(
    instance: &MppInstance,
    horizon: usize,
    config: &MppConfig,
    pruning: Heuristic,
) -> Result<MppModel> {
    instance.validate()?;
    let g = &instance.graph;
    let refs = match pruning {
        Heuristic::None => None,
        _ => Some(ReferencePaths::compute(instance)?),
    };
    let full = instance.k == instance.robot_count();
    let mut model = IpModel::new();
    let mut units: Vec<TimeUnit> = Vec::new();
    let mut goal_feedback = Vec::new();
    for members in instance.units() {
        let starts: Vec<Vertex> = members.iter().map(|&r| instance.starts[r]).collect();
        let goals: Vec<Vertex> = members.iter().map(|&r| instance.goals[r]).collect();
        let ends = unit_ends(instance, &goals, config.partial_ends);
        let mode = match (full, config.partial_ends) {
            (false, PartialEnds::Anywhere) => Reachability::Forward,
            _ => Reachability::Full,
        };
        let mut kept = reachable_copies(g, &starts, &ends, horizon, mode);
        if let Some(refs) = &refs {
            let reference: Vec<&Path> = members.iter().map(|&r| &refs.paths[r]).collect();
            let mask = match pruning {
                Heuristic::Tube(h) => tube_mask(g, &reference, h, horizon),
                Heuristic::Sphere(h) => sphere_mask(g, &reference, h, horizon),
                Heuristic::None => unreachable!(),
            };
            for (layer, m) in kept.iter_mut().zip(&mask) {
                for (k, &m) in layer.iter_mut().zip(m) {
                    *k &= m;
                }
            }
        }
        let spec = UnitSpec {
            label: members[0],
            robots: members.clone(),
            starts,
            ends,
            flow: members.len(),
        };
        let unit = add_time_unit(&mut model, g, &spec, kept)?;
        goal_feedback.extend(
            unit.feedback
                .iter()
                .filter(|f| goals.contains(&f.end))
                .map(|f| f.var),
        );
        units.push(unit);
    }
    add_collision_rows(&mut model, &units, horizon, config)?;
    model.set_objective(
        ObjectiveSense::Maximize,
        goal_feedback.iter().map(|&v| (1.0, v)),
    )?;
    model.add_constraint(
        "k",
        goal_feedback.iter().map(|&v| (1.0, v)),
        Sense::Ge,
        instance.k as f64,
    )?;
    Ok(MppModel {
        encoding: TimeExpandedEncoding {
            model,
            horizon,
            units,
        },
        goal_feedback,
    })
}

/// A row is implied by the flow structure when it has a single term, or when
/// all its terms belong to one single-robot flow.
fn redundant(terms: &[(usize, VarId)], units: &[TimeUnit]) -> bool {
    terms.len() <= 1
        || (terms.iter().all(|t| t.0 == terms[0].0) && units[terms[0].0].robots.len() == 1)
}

fn add_collision_rows(
    model: &mut IpModel,
    units: &[TimeUnit],
    horizon: usize,
    config: &MppConfig,
) -> Result<()> {
    let n = units.first().map_or(0, |u| u.kept[0].len());
    for t in 0..=horizon {
        // arcs entering layer t: feedback edges at t = 0, moves otherwise
        let arcs: Vec<(usize, Vertex, Vertex, VarId)> = units
            .iter()
            .enumerate()
            .flat_map(
                |(i, u)| -> Box<dyn Iterator<Item = (usize, Vertex, Vertex, VarId)> + '_> {
                    if t == 0 {
                        Box::new(u.feedback.iter().map(move |f| (i, f.end, f.start, f.var)))
                    } else {
                        Box::new(u.moves[t].iter().map(move |m| (i, m.from, m.to, m.var)))
                    }
                },
            )
            .collect();
        let mut by_vertex: Vec<Vec<(usize, VarId)>> = vec![Vec::new(); n];
        for &(i, _, to, var) in &arcs {
            by_vertex[to].push((i, var));
        }
        for (v, terms) in by_vertex.iter().enumerate() {
            if !terms.is_empty() && (config.keep_redundant || !redundant(terms, units)) {
                model.add_constraint(
                    format!("vertex[{t}][{v}]"),
                    terms.iter().map(|&(_, x)| (1.0, x)),
                    Sense::Le,
                    1.0,
                )?;
            }
        }
        if t == 0 && !config.literal_feedback_collisions {
            continue;
        }
        let mut by_pair: Vec<((Vertex, Vertex), (usize, VarId))> = arcs
            .iter()
            .filter(|a| a.1 != a.2 || config.keep_redundant)
            .map(|&(i, a, b, var)| ((a.min(b), a.max(b)), (i, var)))
            .collect();
        by_pair.sort_by_key(|e| (e.0, (e.1).1));
        for chunk in by_pair.chunk_by(|x, y| x.0 == y.0) {
            let terms: Vec<(usize, VarId)> = chunk.iter().map(|e| e.1).collect();
            if config.keep_redundant || !redundant(&terms, units) {
                let (a, b) = chunk[0].0;
                model.add_constraint(
                    format!("edge[{t}][{a}][{b}]"),
                    terms.iter().map(|&(_, x)| (1.0, x)),
                    Sense::Le,
                    1.0,
                )?;
            }
        }
    }
    Ok(())
}

enum Attempt {
    Solved(Vec<Path>),
    Infeasible,
    Timeout,
}

fn attempt(
    instance: &MppInstance,
    horizon: usize,
    config: &MppConfig,
    pruning: Heuristic,
    deadline: f64,
    started: Instant,
    stats: &mut SolutionStats,
) -> Result<Attempt> {
    let built = match build_mpp_model(instance, horizon, config, pruning) {
        Ok(m) => m,
        Err(Error::EmptyLayer(_)) => return Ok(Attempt::Infeasible),
        Err(e) => return Err(e),
    };
    let remaining = deadline - started.elapsed().as_secs_f64();
    if remaining <= 0.0 {
        return Ok(Attempt::Timeout);
    }
    let cfg = SolveConfig {
        time_limit: remaining,
        objective_target: Some(instance.k as f64),
        ..config.solver.clone()
    };
    let outcome = solve_with_backend(built.model(), &cfg)?;
    stats.absorb(&outcome);
    stats.variable_count = built.model().variable_count();
    stats.constraint_count = built.model().constraint_count();
    match outcome.status {
        s if s.has_solution() => Ok(Attempt::Solved(
            built.encoding.extract_paths(&outcome.values)?,
        )),
        SolveStatus::Infeasible => Ok(Attempt::Infeasible),
        SolveStatus::TimeoutNoIncumbent => Ok(Attempt::Timeout),
        s => Err(Error::Solver(format!(
            "unexpected solver status {}",
            s.as_str()
        ))),
    }
}

/// Minimum-makespan solution routing at least `k` robots to their goals.
///
/// The status is `Optimal` when every smaller horizon was proven infeasible on
/// an unpruned model, `Feasible` when a smaller horizon was only rejected under
/// pruning, and `TimeoutNoIncumbent` when the time limit or the horizon cap is
/// hit first (the makespan then holds the last horizon tried).
pub fn solve_mpp(instance: &MppInstance, config: &MppConfig) -> Result<Solution> {
    let started = Instant::now();
    config.solver.validate()?;
    let lower = underestimate_t(instance)?;
    let max_t = config
        .max_t
        .unwrap_or(lower + 2 * instance.graph.vertex_count());
    if max_t < lower {
        return Err(Error::Invalid(format!(
            "max_T = {max_t} is below the lower bound {lower}"
        )));
    }
    let deadline = config.solver.time_limit;
    let mut stats = SolutionStats::default();
    let mut proven = true;
    let finish = |status: SolveStatus, paths: Vec<Path>, t: usize, mut stats: SolutionStats| {
        stats.wall_time = started.elapsed().as_secs_f64();
        let mut sol = Solution::with_paths(status, paths);
        sol.makespan = Some(t);
        if status.has_solution() {
            sol.objective = Some(t as f64);
        }
        sol.stats = stats;
        sol
    };
    for t in lower..=max_t {
        let mut result = attempt(
            instance,
            t,
            config,
            config.heuristic,
            deadline,
            started,
            &mut stats,
        )?;
        if matches!(result, Attempt::Infeasible) && config.heuristic != Heuristic::None {
            if config.fallback_to_exact {
                result = attempt(
                    instance,
                    t,
                    config,
                    Heuristic::None,
                    deadline,
                    started,
                    &mut stats,
                )?;
            } else {
                proven = false;
            }
        }
        match result {
            Attempt::Solved(paths) => {
                let status = if proven {
                    SolveStatus::Optimal
                } else {
                    SolveStatus::Feasible
                };
                return Ok(finish(status, paths, t, stats));
            }
            Attempt::Infeasible => {}
            Attempt::Timeout => {
                return Ok(finish(
                    SolveStatus::TimeoutNoIncumbent,
                    Vec::new(),
                    t,
                    stats,
                ))
            }
        }
    }
    Ok(finish(
        SolveStatus::TimeoutNoIncumbent,
        Vec::new(),
        max_t,
        stats,
    ))
}
