//! Reward collection on a time-expanded graph: a virtual vertex `u` feeds one
//! unit of flow into a candidate start at layer 0 and collects it from a
//! candidate goal at the last layer.

use std::time::Instant;

use crate::encoding::{add_flow_rows, add_moves, reachable_copies, Move, Reachability};
use crate::error::{Error, Result};
use crate::graph::{Path, Vertex};
use crate::instance::{RcpInstance, RcpVariant};
use crate::model::{IpModel, ObjectiveSense, Sense, VarId, VarKind};
use crate::solution::{Solution, SolutionStats};
use crate::solver::{solve_with_backend, SolveConfig, SolveStatus};
use crate::validate::evaluate_rcp;

/// Horizon cap as a multiple of the vertex count.
pub const VISIT_CAP: usize = 2;

/// Number of moves that fits the budget at the cheapest edge cost, capped at
/// `2|V|`.
pub fn choose_horizon(instance: &RcpInstance) -> Result<usize> {
    let cap = VISIT_CAP * instance.graph.vertex_count();
    let Some(c_min) = instance.edge_costs.iter().copied().reduce(f64::min) else {
        return Ok(0);
    };
    if c_min <= 0.0 {
        return Err(Error::Invalid(
            "zero-cost edge: an explicit horizon is required".into(),
        ));
    }
    let t = (instance.budget / c_min + 1e-9).floor();
    Ok(if t >= cap as f64 { cap } else { t as usize })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcpConfig {
    /// Number of moves; chosen from the budget when absent.
    pub horizon: Option<usize>,
    pub reachability: Reachability,
    pub solver: SolveConfig,
}

impl Default for RcpConfig {
    fn default() -> Self {
        Self {
            horizon: None,
            reachability: Reachability::Full,
            solver: SolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcpEncoding {
    /// Model with a linear objective (reward products already replaced).
    pub model: IpModel,
    pub horizon: usize,
    pub kept: Vec<Vec<bool>>,
    pub moves: Vec<Vec<Move>>,
    /// Edges `u -> (0, v)`.
    pub entries: Vec<(Vertex, VarId)>,
    /// Edges `(T, v) -> u`.
    pub exits: Vec<(Vertex, VarId)>,
    pub visit_vars: Vec<VarId>,
    /// Dwell time per vertex (tourist variant only).
    pub dwell_vars: Vec<VarId>,
}

fn build_common(
    instance: &RcpInstance,
    horizon: usize,
    reachability: Reachability,
) -> Result<RcpEncoding> {
    instance.validate()?;
    let g = &instance.graph;
    let n = g.vertex_count();
    let kept = reachable_copies(g, &instance.starts, &instance.goals, horizon, reachability);
    if let Some(t) = kept.iter().position(|l| !l.contains(&true)) {
        return Err(Error::EmptyLayer(format!("no vertex kept at layer {t}")));
    }
    let mut model = IpModel::new();
    let entries: Vec<(Vertex, VarId)> = instance
        .starts
        .iter()
        .filter(|&&v| kept[0][v])
        .map(|&v| (v, model.add_binary(format!("x[0][0][u][{v}]"))))
        .collect();
    let last = horizon + 1;
    let exits: Vec<(Vertex, VarId)> = instance
        .goals
        .iter()
        .filter(|&&v| kept[horizon][v])
        .map(|&v| (v, model.add_binary(format!("x[0][{last}][{v}][u]"))))
        .collect();
    if entries.is_empty() || exits.is_empty() {
        return Err(Error::EmptyLayer("no start or goal copy survives".into()));
    }
    let moves = add_moves(&mut model, g, 0, &kept);
    let visit_vars: Vec<VarId> = (0..n)
        .map(|i| model.add_binary(format!("xv[{i}]")))
        .collect();
    model.add_constraint(
        "entry",
        entries.iter().map(|&(_, x)| (1.0, x)),
        Sense::Eq,
        1.0,
    )?;
    model.add_constraint("exit", exits.iter().map(|&(_, x)| (1.0, x)), Sense::Eq, 1.0)?;
    add_flow_rows(&mut model, 0, &kept, &moves, &entries, &exits)?;
    let mut arrivals: Vec<Vec<(f64, VarId)>> = vec![Vec::new(); n];
    for &(v, x) in &entries {
        arrivals[v].push((-1.0, x));
    }
    for layer in &moves[1..] {
        for m in layer {
            arrivals[m.to].push((-1.0, m.var));
        }
    }
    for (i, terms) in arrivals.into_iter().enumerate() {
        let mut row = vec![(1.0, visit_vars[i])];
        row.extend(terms);
        model.add_constraint(format!("visit[{i}]"), row, Sense::Le, 0.0)?;
    }
    Ok(RcpEncoding {
        model,
        horizon,
        kept,
        moves,
        entries,
        exits,
        visit_vars,
        dwell_vars: Vec::new(),
    })
}

fn movement_cost(instance: &RcpInstance, enc: &RcpEncoding) -> Vec<(f64, VarId)> {
    enc.moves
        .iter()
        .flatten()
        .map(|m| (instance.cost(m.from, m.to), m.var))
        .filter(|&(c, _)| c != 0.0)
        .collect()
}

/// Correlated orienteering model: reward `r_i` per visited vertex plus
/// `r_j / |N(j)|` for every visited `i` next to an unvisited `j`.
pub fn build_qcop(
    instance: &RcpInstance,
    horizon: usize,
    reachability: Reachability,
) -> Result<RcpEncoding> {
    let RcpVariant::Qcop { rewards } = &instance.variant else {
        return Err(Error::Invalid(
            "instance is not a correlated orienteering problem".into(),
        ));
    };
    let mut enc = build_common(instance, horizon, reachability)?;
    let g = &instance.graph;
    enc.model.add_constraint(
        "budget",
        movement_cost(instance, &enc),
        Sense::Le,
        instance.budget,
    )?;
    let x = &enc.visit_vars;
    let mut linear = Vec::new();
    for i in 0..g.vertex_count() {
        let partial: f64 = g
            .neighbors(i)
            .iter()
            .map(|&j| rewards[j] / g.degree(j) as f64)
            .sum();
        if rewards[i] + partial != 0.0 {
            linear.push((rewards[i] + partial, x[i]));
        }
    }
    enc.model.set_objective(ObjectiveSense::Maximize, linear)?;
    for i in 0..g.vertex_count() {
        for &j in g.neighbors(i) {
            let w = rewards[j] / g.degree(j) as f64;
            if w != 0.0 {
                enc.model.add_quadratic_term(-w, x[i], x[j])?;
            }
        }
    }
    enc.model = enc.model.linearize()?;
    Ok(enc)
}

/// Tourist model: closed walk, dwell `t_i <= c* x_i`, budget covering moves
/// and dwell, reward `sum a_i t_i`.
pub fn build_otp(
    instance: &RcpInstance,
    horizon: usize,
    reachability: Reachability,
) -> Result<RcpEncoding> {
    let RcpVariant::Otp { rates } = &instance.variant else {
        return Err(Error::Invalid("instance is not a tourist problem".into()));
    };
    let mut enc = build_common(instance, horizon, reachability)?;
    let n = instance.graph.vertex_count();
    let budget = instance.budget;
    enc.dwell_vars = (0..n)
        .map(|i| {
            enc.model.add_variable(
                VarKind::Continuous {
                    lower: 0.0,
                    upper: budget,
                },
                format!("t[{i}]"),
            )
        })
        .collect::<Result<_>>()?;
    let mut row = movement_cost(instance, &enc);
    row.extend(enc.dwell_vars.iter().map(|&t| (1.0, t)));
    enc.model.add_constraint("budget", row, Sense::Le, budget)?;
    for &v in &instance.starts {
        let entry = enc.entries.iter().find(|e| e.0 == v).map(|e| (1.0, e.1));
        let exit = enc.exits.iter().find(|e| e.0 == v).map(|e| (-1.0, e.1));
        let terms: Vec<(f64, VarId)> = entry.into_iter().chain(exit).collect();
        if !terms.is_empty() {
            enc.model
                .add_constraint(format!("closed[{v}]"), terms, Sense::Eq, 0.0)?;
        }
    }
    for i in 0..n {
        enc.model.add_constraint(
            format!("dwell[{i}]"),
            [(1.0, enc.dwell_vars[i]), (-budget, enc.visit_vars[i])],
            Sense::Le,
            0.0,
        )?;
    }
    enc.model.set_objective(
        ObjectiveSense::Maximize,
        (0..n)
            .filter(|&i| rates[i] != 0.0)
            .map(|i| (rates[i], enc.dwell_vars[i])),
    )?;
    Ok(enc)
}

impl RcpEncoding {
    /// The walk encoded by an assignment, waits removed.
    pub fn extract_walk(&self, values: &[f64]) -> Result<Path> {
        let on = |v: VarId| values[v.0] > 0.5;
        let mut cur = self
            .entries
            .iter()
            .find(|e| on(e.1))
            .map(|e| e.0)
            .ok_or_else(|| Error::Model("no entry edge used".into()))?;
        let mut walk = vec![cur];
        for t in 1..=self.horizon {
            let next = self.moves[t]
                .iter()
                .find(|m| m.from == cur && on(m.var))
                .ok_or_else(|| Error::Model(format!("walk breaks at layer {t}")))?;
            cur = next.to;
            if walk.last() != Some(&cur) {
                walk.push(cur);
            }
        }
        if !self.exits.iter().any(|e| e.0 == cur && on(e.1)) {
            return Err(Error::Model(
                "walk does not leave through an exit edge".into(),
            ));
        }
        Ok(Path::new(walk))
    }
}

/// Optimal reward walk (and dwell times for the tourist variant).
pub fn solve_rcp(instance: &RcpInstance, config: &RcpConfig) -> Result<Solution> {
    let started = Instant::now();
    config.solver.validate()?;
    let horizon = match config.horizon {
        Some(t) => t,
        None => choose_horizon(instance)?,
    };
    let built = match instance.variant {
        RcpVariant::Qcop { .. } => build_qcop(instance, horizon, config.reachability),
        RcpVariant::Otp { .. } => build_otp(instance, horizon, config.reachability),
    };
    let enc = match built {
        Ok(e) => e,
        Err(Error::EmptyLayer(_)) => return Ok(Solution::empty(SolveStatus::Infeasible)),
        Err(e) => return Err(e),
    };
    let outcome = solve_with_backend(&enc.model, &config.solver)?;
    let mut stats = SolutionStats {
        variable_count: enc.model.variable_count(),
        constraint_count: enc.model.constraint_count(),
        ..Default::default()
    };
    stats.absorb(&outcome);
    let mut sol = Solution::empty(outcome.status);
    if outcome.status.has_solution() {
        let walk = enc.extract_walk(&outcome.values)?;
        if instance.is_otp() {
            let mut dwell: Vec<f64> = enc
                .dwell_vars
                .iter()
                .map(|t| outcome.values[t.0].max(0.0))
                .collect();
            for (i, d) in dwell.iter_mut().enumerate() {
                if *d < 1e-9 || !walk.vertices.contains(&i) {
                    *d = 0.0;
                }
            }
            // absorb solver round-off so the budget holds exactly
            let cost = evaluate_rcp(instance, &walk, &dwell)?.cost;
            if cost > instance.budget {
                let top = (0..dwell.len())
                    .max_by(|&a, &b| dwell[a].total_cmp(&dwell[b]))
                    .unwrap_or(0);
                dwell[top] = (dwell[top] - (cost - instance.budget)).max(0.0);
            }
            sol.dwell_times = dwell;
        }
        sol.reward = Some(evaluate_rcp(instance, &walk, &sol.dwell_times)?.reward);
        sol.objective = outcome.objective;
        sol.paths = vec![walk];
    }
    stats.wall_time = started.elapsed().as_secs_f64();
    sol.stats = stats;
    Ok(sol)
}
