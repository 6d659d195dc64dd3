//! Multi-robot minimum constraint removal over the region graph.

use std::collections::VecDeque;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::{add_base_unit, BaseUnit};
use crate::error::{Error, Result};
use crate::graph::{Graph, Path, Vertex};
use crate::instance::MmcrInstance;
use crate::model::{IpModel, ObjectiveSense, Sense, VarId};
use crate::solution::{Solution, SolutionStats};
use crate::solver::{solve_with_backend, SolveConfig, SolveStatus};
use crate::validate::free_vertices;

/// Quotient of the graph whose vertices are maximal connected vertex sets
/// sharing the same obstacle memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGraph {
    /// Sorted vertex sets, ordered by their smallest vertex.
    pub regions: Vec<Vec<Vertex>>,
    pub region_edges: Vec<(usize, usize)>,
    pub vertex_to_region: Vec<usize>,
    /// Obstacles containing each region.
    pub region_obstacles: Vec<Vec<usize>>,
    pub graph: Graph,
}

/// Grows regions by breadth-first search from vertices taken in a seeded
/// random order. Regions are relabeled by their smallest vertex, so the result
/// does not depend on the seed.
pub fn build_region_graph(instance: &MmcrInstance, seed: u64) -> Result<RegionGraph> {
    let g = &instance.graph;
    let n = g.vertex_count();
    let member = instance.memberships();
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut label = vec![usize::MAX; n];
    let mut regions: Vec<Vec<Vertex>> = Vec::new();
    for &root in &order {
        if label[root] != usize::MAX {
            continue;
        }
        let id = regions.len();
        let mut region = vec![root];
        label[root] = id;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX && member[w] == member[root] {
                    label[w] = id;
                    region.push(w);
                    queue.push_back(w);
                }
            }
        }
        region.sort_unstable();
        regions.push(region);
    }
    regions.sort_by_key(|r| r[0]);
    let mut vertex_to_region = vec![0; n];
    for (i, r) in regions.iter().enumerate() {
        for &v in r {
            vertex_to_region[v] = i;
        }
    }
    let mut region_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| (vertex_to_region[a], vertex_to_region[b]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    region_edges.sort_unstable();
    region_edges.dedup();
    let region_obstacles = regions.iter().map(|r| member[r[0]].clone()).collect();
    let graph = Graph::new_unchecked_connectivity(regions.len(), &region_edges)?;
    Ok(RegionGraph {
        regions,
        region_edges,
        vertex_to_region,
        region_obstacles,
        graph,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MmcrConfig {
    /// Order in which region growth visits vertices.
    pub seed: u64,
    pub solver: SolveConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmcrModel {
    pub model: IpModel,
    pub regions: RegionGraph,
    /// Path variables per robot; `None` when start and goal share a region.
    pub units: Vec<Option<BaseUnit>>,
    pub region_vars: Vec<VarId>,
    pub obstacle_vars: Vec<VarId>,
}

pub fn build_mmcr_model(instance: &MmcrInstance, seed: u64) -> Result<MmcrModel> {
    instance.validate()?;
    let regions = build_region_graph(instance, seed)?;
    let rg = &regions.graph;
    let n = instance.robot_count();
    let mut model = IpModel::new();
    let mut units = Vec::with_capacity(n);
    for r in 0..n {
        let (s, g) = (
            regions.vertex_to_region[instance.starts[r]],
            regions.vertex_to_region[instance.goals[r]],
        );
        units.push(if s == g {
            None
        } else {
            Some(add_base_unit(&mut model, rg, r, s, g, false)?)
        });
    }
    let region_vars: Vec<VarId> = (0..rg.vertex_count())
        .map(|i| model.add_binary(format!("xV[{i}]")))
        .collect();
    let obstacle_vars: Vec<VarId> = (0..instance.obstacles.len())
        .map(|i| model.add_binary(format!("xO[{i}]")))
        .collect();
    for (i, &xv) in region_vars.iter().enumerate() {
        let mut row = Vec::new();
        for unit in units.iter().flatten() {
            for &j in rg.neighbors(i) {
                row.push((-1.0, unit.edge_var(i, j).expect("edge variable")));
                row.push((-1.0, unit.edge_var(j, i).expect("edge variable")));
            }
        }
        if !row.is_empty() {
            row.insert(0, ((2 * n * rg.degree(i)) as f64, xv));
            model.add_constraint(format!("region[{i}]"), row, Sense::Ge, 0.0)?;
        }
    }
    let mut inside: Vec<Vec<usize>> = vec![Vec::new(); instance.obstacles.len()];
    for (i, obs) in regions.region_obstacles.iter().enumerate() {
        for &o in obs {
            inside[o].push(i);
        }
    }
    for (o, regs) in inside.iter().enumerate() {
        let mut row = vec![(regs.len() as f64, obstacle_vars[o])];
        row.extend(regs.iter().map(|&i| (-1.0, region_vars[i])));
        model.add_constraint(format!("obstacle[{o}]"), row, Sense::Ge, 0.0)?;
    }
    for r in 0..n {
        for v in [instance.starts[r], instance.goals[r]] {
            for &o in &regions.region_obstacles[regions.vertex_to_region[v]] {
                model.set_bounds(obstacle_vars[o], 1.0, 1.0)?;
            }
        }
    }
    model.set_objective(
        ObjectiveSense::Minimize,
        obstacle_vars.iter().map(|&x| (1.0, x)),
    )?;
    Ok(MmcrModel {
        model,
        regions,
        units,
        region_vars,
        obstacle_vars,
    })
}

/// Breadth-first route per robot avoiding every obstacle not removed.
pub fn extract_witness_paths(instance: &MmcrInstance, removed: &[usize]) -> Result<Vec<Path>> {
    let free = free_vertices(instance, removed);
    (0..instance.robot_count())
        .map(|r| {
            let (s, g) = (instance.starts[r], instance.goals[r]);
            if !free[s] || !free[g] {
                return Err(Error::Unreachable { robot: r });
            }
            instance
                .graph
                .shortest_path_filtered(s, g, |v| free[v])
                .map(Path::new)
                .ok_or(Error::Unreachable { robot: r })
        })
        .collect()
}

/// Minimum number of obstacles to remove so that every robot can reach its
/// goal, with witness routes.
pub fn solve_mmcr(instance: &MmcrInstance, config: &MmcrConfig) -> Result<Solution> {
    let started = Instant::now();
    config.solver.validate()?;
    let built = build_mmcr_model(instance, config.seed)?;
    let outcome = solve_with_backend(&built.model, &config.solver)?;
    let mut stats = SolutionStats {
        variable_count: built.model.variable_count(),
        constraint_count: built.model.constraint_count(),
        ..SolutionStats::default()
    };
    stats.absorb(&outcome);
    let mut sol = Solution::empty(outcome.status);
    if outcome.status.has_solution() {
        sol.removed_obstacles = built
            .obstacle_vars
            .iter()
            .enumerate()
            .filter(|(_, x)| outcome.values[x.0] > 0.5)
            .map(|(i, _)| i)
            .collect();
        sol.paths = extract_witness_paths(instance, &sol.removed_obstacles)?;
        sol.objective = Some(sol.removed_obstacles.len() as f64);
    } else if outcome.status == SolveStatus::Infeasible {
        return Err(Error::Model("removal model is infeasible".into()));
    }
    stats.wall_time = started.elapsed().as_secs_f64();
    sol.stats = stats;
    Ok(sol)
}
