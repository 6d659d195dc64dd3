//! Branch-and-bound MILP engine.
//!
//! LP relaxations are solved with the dual/primal simplex from `minilp`.
//! Child nodes are warm-started from the parent's final tableau: binaries are
//! branched by fixing them, general integers by adding a bound row.

mod backend;

pub use backend::{parse_solution_file, write_solution_file, Backend, Embedded, ExternalProcess};

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::model::{IpModel, ObjectiveSense, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchingRule {
    /// Variable whose value is closest to one half; ties go to the lowest id.
    MostFractional,
    /// Lowest-id fractional variable.
    FirstFractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrder {
    BestBound,
    /// Dives into the up-branch first.
    DepthFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Wall-clock limit in seconds. Checked between nodes.
    pub time_limit: f64,
    pub integrality_tolerance: f64,
    /// Tolerance used when re-checking rows of a candidate incumbent.
    pub lp_tolerance: f64,
    /// Relative gap below which an incumbent is declared optimal.
    pub gap_tolerance: f64,
    pub branching: BranchingRule,
    pub node_order: NodeOrder,
    /// Kept for reproducible configurations. The built-in rules break every
    /// tie by variable id, so the search itself draws no random numbers.
    pub seed: u64,
    /// Stop as soon as the incumbent is at least this good.
    pub objective_target: Option<f64>,
    pub node_limit: Option<usize>,
    /// Record one [`NodeRecord`] per processed node.
    pub record_nodes: bool,
    /// Engine used by the problem layers through [`solve_with_backend`].
    pub backend: BackendChoice,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum BackendChoice {
    #[default]
    Embedded,
    /// External program, see [`ExternalProcess`].
    External(String),
}

impl BackendChoice {
    /// Parses `embedded` or `external:<command>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "embedded" => Ok(BackendChoice::Embedded),
            Some(("external", cmd)) if !cmd.trim().is_empty() => {
                Ok(BackendChoice::External(cmd.trim().to_string()))
            }
            _ => Err(Error::Solver(format!(
                "unknown backend `{s}` (expected embedded or external:<command>)"
            ))),
        }
    }
}

/// Solves with the engine selected in `config.backend`.
pub fn solve_with_backend(model: &IpModel, config: &SolveConfig) -> Result<SolveOutcome> {
    match &config.backend {
        BackendChoice::Embedded => Embedded.solve(model, config),
        BackendChoice::External(cmd) => ExternalProcess::new(cmd.clone()).solve(model, config),
    }
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit: f64::INFINITY,
            integrality_tolerance: 1e-6,
            lp_tolerance: 1e-7,
            gap_tolerance: 1e-6,
            branching: BranchingRule::MostFractional,
            node_order: NodeOrder::BestBound,
            seed: 0,
            objective_target: None,
            node_limit: None,
            record_nodes: false,
            backend: BackendChoice::Embedded,
        }
    }
}

impl SolveConfig {
    // negated comparisons so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.time_limit > 0.0) {
            return Err(Error::Solver("time limit must be positive".into()));
        }
        for (name, tol) in [
            ("integrality", self.integrality_tolerance),
            ("lp", self.lp_tolerance),
            ("gap", self.gap_tolerance),
        ] {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(Error::Solver(format!("{name} tolerance must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// An incumbent exists but optimality was not proven (limit or target hit).
    Feasible,
    Infeasible,
    Unbounded,
    TimeoutNoIncumbent,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::TimeoutNoIncumbent => "timeout",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "optimal" => SolveStatus::Optimal,
            "feasible" => SolveStatus::Feasible,
            "infeasible" => SolveStatus::Infeasible,
            "unbounded" => SolveStatus::Unbounded,
            "timeout" => SolveStatus::TimeoutNoIncumbent,
            _ => return None,
        })
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub nodes: usize,
    /// Number of LP solves, counting warm-started re-solves.
    pub lp_solves: usize,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: usize,
    pub depth: usize,
    /// Objective of the node's LP relaxation, `None` when it was infeasible.
    pub lp_bound: Option<f64>,
    pub incumbent: Option<f64>,
    /// Best bound over this node and all open nodes.
    pub global_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Values indexed by variable id. Empty without an incumbent.
    pub values: Vec<f64>,
    pub objective: Option<f64>,
    pub bound: f64,
    pub stats: SolveStats,
    pub node_log: Vec<NodeRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
    Timeout,
}

fn check_solvable(model: &IpModel) -> Result<()> {
    if !model.is_linear() {
        return Err(Error::Solver(
            "model has quadratic terms; linearize it first".into(),
        ));
    }
    model.validate()
}

/// Rows without terms are decided here because the simplex never sees them.
fn empty_rows_hold(model: &IpModel, tol: f64) -> bool {
    model
        .constraints()
        .iter()
        .filter(|c| c.terms.is_empty())
        .all(|c| c.is_satisfied(&[], tol))
}

fn build_problem(model: &IpModel) -> (Problem, Vec<minilp::Variable>) {
    let direction = match model.objective().sense {
        ObjectiveSense::Maximize => OptimizationDirection::Maximize,
        ObjectiveSense::Minimize => OptimizationDirection::Minimize,
    };
    let mut cost = vec![0.0; model.variable_count()];
    for &(c, v) in &model.objective().linear {
        cost[v.0] += c;
    }
    let mut problem = Problem::new(direction);
    let vars: Vec<_> = model
        .variables()
        .iter()
        .map(|v| problem.add_var(cost[v.id.0], (v.lower(), v.upper())))
        .collect();
    for c in model.constraints().iter().filter(|c| !c.terms.is_empty()) {
        let op = match c.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Ge => ComparisonOp::Ge,
            Sense::Eq => ComparisonOp::Eq,
        };
        problem.add_constraint(
            c.terms
                .iter()
                .map(|&(a, v)| (vars[v.0], a))
                .collect::<Vec<_>>(),
            op,
            c.rhs,
        );
    }
    (problem, vars)
}

enum LpResult {
    Solved(minilp::Solution),
    Infeasible,
    Unbounded,
    Numerical,
}

fn guarded(f: impl FnOnce() -> std::result::Result<minilp::Solution, minilp::Error>) -> LpResult {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) if s.objective().is_finite() => LpResult::Solved(s),
        Ok(Ok(_)) => LpResult::Numerical,
        Ok(Err(minilp::Error::Infeasible)) => LpResult::Infeasible,
        Ok(Err(minilp::Error::Unbounded)) => LpResult::Unbounded,
        Err(_) => LpResult::Numerical,
    }
}

/// Solves the LP relaxation (integrality dropped). Its objective bounds the
/// MILP optimum from above for maximization and from below for minimization.
pub fn lp_relax(model: &IpModel) -> Result<LpOutcome> {
    check_solvable(model)?;
    let n = model.variable_count();
    if !empty_rows_hold(model, 1e-9) {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            values: Vec::new(),
        });
    }
    let (problem, vars) = build_problem(model);
    Ok(match guarded(|| problem.solve()) {
        LpResult::Solved(s) => {
            let values: Vec<f64> = vars.iter().map(|&v| s[v]).collect();
            debug_assert_eq!(values.len(), n);
            LpOutcome {
                status: LpStatus::Optimal,
                objective: s.objective(),
                values,
            }
        }
        LpResult::Infeasible => LpOutcome {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            values: Vec::new(),
        },
        LpResult::Unbounded => LpOutcome {
            status: LpStatus::Unbounded,
            objective: f64::NAN,
            values: Vec::new(),
        },
        LpResult::Numerical => LpOutcome {
            status: LpStatus::NumericalFailure,
            objective: f64::NAN,
            values: Vec::new(),
        },
    })
}

/// Searches for any feasible assignment, ignoring the objective.
pub fn check_feasibility(model: &IpModel, config: &SolveConfig) -> Result<Feasibility> {
    let mut cfg = config.clone();
    cfg.objective_target = Some(0.0);
    cfg.node_order = NodeOrder::DepthFirst;
    let outcome = solve(&model.without_objective(), &cfg)?;
    Ok(match outcome.status {
        SolveStatus::Optimal | SolveStatus::Feasible => Feasibility::Feasible(outcome.values),
        SolveStatus::Infeasible => Feasibility::Infeasible,
        SolveStatus::Unbounded => unreachable!("bounded variables cannot give an unbounded LP"),
        SolveStatus::TimeoutNoIncumbent => Feasibility::Timeout,
    })
}

/// One bound change on the path from the root to a node.
#[derive(Debug, Clone, Copy)]
struct BoundChange {
    var: usize,
    lower: f64,
    upper: f64,
}

struct Node {
    id: usize,
    depth: usize,
    /// Parent relaxation value in "maximize" orientation.
    bound: f64,
    changes: Vec<BoundChange>,
    warm: Option<Arc<minilp::Solution>>,
}

/// Heap entry ordering nodes by bound, then by creation order.
struct Ranked(Node);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .bound
            .total_cmp(&other.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

enum Frontier {
    Heap(BinaryHeap<Ranked>),
    Stack(Vec<Node>),
}

impl Frontier {
    fn push(&mut self, node: Node) {
        match self {
            Frontier::Heap(h) => h.push(Ranked(node)),
            Frontier::Stack(s) => s.push(node),
        }
    }

    fn pop(&mut self) -> Option<Node> {
        match self {
            Frontier::Heap(h) => h.pop().map(|r| r.0),
            Frontier::Stack(s) => s.pop(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Frontier::Heap(h) => h.len(),
            Frontier::Stack(s) => s.len(),
        }
    }

    fn best_bound(&self) -> f64 {
        match self {
            Frontier::Heap(h) => h.peek().map(|r| r.0.bound).unwrap_or(f64::NEG_INFINITY),
            Frontier::Stack(s) => s.iter().map(|n| n.bound).fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Beyond this many open nodes, children are rebuilt from the root relaxation
/// instead of holding on to a copy of the parent tableau.
const MAX_WARM_NODES: usize = 512;

/// Solves a linear model with integer variables to optimality, or until a
/// limit or the objective target is reached.
pub fn solve(model: &IpModel, config: &SolveConfig) -> Result<SolveOutcome> {
    config.validate()?;
    check_solvable(model)?;
    let start = Instant::now();
    let sign = match model.objective().sense {
        ObjectiveSense::Maximize => 1.0,
        ObjectiveSense::Minimize => -1.0,
    };
    let mut stats = SolveStats::default();
    let mut log = Vec::new();
    let finish = |status,
                  values: Vec<f64>,
                  objective: Option<f64>,
                  bound: f64,
                  mut stats: SolveStats,
                  log| {
        stats.wall_time = start.elapsed().as_secs_f64();
        Ok(SolveOutcome {
            status,
            values,
            objective,
            bound,
            stats,
            node_log: log,
        })
    };

    if !empty_rows_hold(model, config.lp_tolerance) {
        return finish(
            SolveStatus::Infeasible,
            Vec::new(),
            None,
            f64::NAN,
            stats,
            log,
        );
    }

    let integral: Vec<bool> = model.variables().iter().map(|v| v.is_integral()).collect();
    let integral_objective = model
        .objective()
        .linear
        .iter()
        .all(|&(c, v)| integral[v.0] && c == c.round());
    // Tightens a relaxation value (maximize orientation) when every feasible
    // objective value is an integer.
    let tighten = |z: f64| {
        if integral_objective {
            (z + 1e-6).floor()
        } else {
            z
        }
    };
    let target = config.objective_target.map(|t| sign * t);

    let (problem, vars) = build_problem(model);
    stats.lp_solves += 1;
    let root = match guarded(|| problem.solve()) {
        LpResult::Solved(s) => Arc::new(s),
        LpResult::Infeasible => {
            return finish(
                SolveStatus::Infeasible,
                Vec::new(),
                None,
                f64::NAN,
                stats,
                log,
            )
        }
        LpResult::Unbounded => {
            return finish(
                SolveStatus::Unbounded,
                Vec::new(),
                None,
                sign * f64::INFINITY,
                stats,
                log,
            )
        }
        LpResult::Numerical => {
            return Err(Error::Solver(
                "numerical failure in the root relaxation".into(),
            ))
        }
    };

    let mut frontier = match config.node_order {
        NodeOrder::BestBound => Frontier::Heap(BinaryHeap::new()),
        NodeOrder::DepthFirst => Frontier::Stack(Vec::new()),
    };
    let mut next_id = 1;
    frontier.push(Node {
        id: 0,
        depth: 0,
        bound: f64::INFINITY,
        changes: Vec::new(),
        warm: None,
    });

    // incumbent objective in maximize orientation
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut limit_hit = false;
    let mut target_hit = false;
    let gap = |inc: f64| config.gap_tolerance * inc.abs().max(1.0);

    while let Some(node) = frontier.pop() {
        if let Some((inc, _)) = &incumbent {
            if tighten(node.bound) <= inc + gap(*inc) {
                continue;
            }
        }
        if start.elapsed().as_secs_f64() > config.time_limit
            || config.node_limit.is_some_and(|l| stats.nodes >= l)
        {
            frontier.push(node);
            limit_hit = true;
            break;
        }
        stats.nodes += 1;

        let lp = if node.id == 0 {
            LpResult::Solved((*root).clone())
        } else {
            stats.lp_solves += 1;
            let base = node.warm.clone();
            let changes = node.changes.clone();
            let root = Arc::clone(&root);
            let vars = &vars;
            guarded(move || match base {
                Some(parent) => {
                    let s = Arc::try_unwrap(parent).unwrap_or_else(|a| (*a).clone());
                    apply_change(s, vars, *changes.last().expect("child has a change"))
                }
                None => {
                    let mut s = (*root).clone();
                    for &c in &changes {
                        s = apply_change(s, vars, c)?;
                    }
                    Ok(s)
                }
            })
        };
        let solution = match lp {
            LpResult::Solved(s) => s,
            LpResult::Infeasible => {
                record(&mut log, config, &node, None, &incumbent, &frontier, sign);
                continue;
            }
            // a bounded subproblem of a bounded root cannot be unbounded
            LpResult::Unbounded | LpResult::Numerical => {
                return Err(Error::Solver(format!(
                    "numerical failure at branch node {}",
                    node.id
                )));
            }
        };
        let z = sign * solution.objective();
        record(
            &mut log,
            config,
            &node,
            Some(z),
            &incumbent,
            &frontier,
            sign,
        );
        if let Some((inc, _)) = &incumbent {
            if tighten(z) <= inc + gap(*inc) {
                continue;
            }
        }

        let values: Vec<f64> = vars.iter().map(|&v| solution[v]).collect();
        let branch_var = pick_branch_var(&values, &integral, config);
        match branch_var {
            None => {
                let rounded: Vec<f64> = values
                    .iter()
                    .zip(&integral)
                    .map(|(&x, &int)| if int { x.round() } else { x })
                    .collect();
                let tol = config.lp_tolerance.max(config.integrality_tolerance) * 10.0;
                if model.is_feasible(&rounded, tol) {
                    let obj = sign * model.evaluate_objective(&rounded);
                    if incumbent.as_ref().is_none_or(|(inc, _)| obj > *inc) {
                        incumbent = Some((obj, rounded));
                    }
                    if let Some(t) = target {
                        if obj >= t - gap(t) {
                            target_hit = true;
                            break;
                        }
                    }
                }
            }
            Some(j) => {
                let x = values[j];
                let var = model.variable(crate::model::VarId(j));
                let (lo, hi) = current_bounds(&node.changes, j, var.lower(), var.upper());
                let down = BoundChange {
                    var: j,
                    lower: lo,
                    upper: x.floor(),
                };
                let up = BoundChange {
                    var: j,
                    lower: x.ceil(),
                    upper: hi,
                };
                let warm = if frontier.len() < MAX_WARM_NODES {
                    Some(Arc::new(solution))
                } else {
                    None
                };
                let make = |change: BoundChange, id: usize| {
                    let mut changes = node.changes.clone();
                    changes.push(change);
                    Node {
                        id,
                        depth: node.depth + 1,
                        bound: z,
                        changes,
                        warm: warm.clone(),
                    }
                };
                let (first, second) = match config.node_order {
                    // the stack pops the up branch first
                    NodeOrder::DepthFirst => (make(down, next_id + 1), make(up, next_id)),
                    NodeOrder::BestBound => (make(down, next_id), make(up, next_id + 1)),
                };
                next_id += 2;
                frontier.push(first);
                frontier.push(second);
            }
        }
    }

    let open_bound = tighten(frontier.best_bound());
    match incumbent {
        Some((inc, values)) => {
            let bound = if limit_hit || target_hit {
                open_bound.max(inc)
            } else {
                inc
            };
            let proven = bound <= inc + gap(inc);
            let status = if proven {
                SolveStatus::Optimal
            } else {
                SolveStatus::Feasible
            };
            finish(status, values, Some(sign * inc), sign * bound, stats, log)
        }
        None if limit_hit => finish(
            SolveStatus::TimeoutNoIncumbent,
            Vec::new(),
            None,
            sign * open_bound,
            stats,
            log,
        ),
        None => finish(
            SolveStatus::Infeasible,
            Vec::new(),
            None,
            f64::NAN,
            stats,
            log,
        ),
    }
}

fn current_bounds(changes: &[BoundChange], var: usize, lower: f64, upper: f64) -> (f64, f64) {
    changes
        .iter()
        .filter(|c| c.var == var)
        .fold((lower, upper), |(lo, hi), c| {
            (lo.max(c.lower), hi.min(c.upper))
        })
}

fn apply_change(
    s: minilp::Solution,
    vars: &[minilp::Variable],
    c: BoundChange,
) -> std::result::Result<minilp::Solution, minilp::Error> {
    let v = vars[c.var];
    if c.lower > c.upper {
        return Err(minilp::Error::Infeasible);
    }
    if c.lower == c.upper {
        return s.fix_var(v, c.lower);
    }
    let s = s.add_constraint([(v, 1.0)], ComparisonOp::Ge, c.lower)?;
    s.add_constraint([(v, 1.0)], ComparisonOp::Le, c.upper)
}

fn pick_branch_var(values: &[f64], integral: &[bool], config: &SolveConfig) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, (&x, &int)) in values.iter().zip(integral).enumerate() {
        if !int {
            continue;
        }
        let frac = (x - x.floor()).min(x.ceil() - x);
        if frac <= config.integrality_tolerance {
            continue;
        }
        match config.branching {
            BranchingRule::FirstFractional => return Some(j),
            BranchingRule::MostFractional => {
                if best.is_none_or(|(_, f)| frac > f + 1e-12) {
                    best = Some((j, frac));
                }
            }
        }
    }
    best.map(|(j, _)| j)
}

fn record(
    log: &mut Vec<NodeRecord>,
    config: &SolveConfig,
    node: &Node,
    z: Option<f64>,
    incumbent: &Option<(f64, Vec<f64>)>,
    frontier: &Frontier,
    sign: f64,
) {
    if !config.record_nodes {
        return;
    }
    let inc = incumbent.as_ref().map(|(v, _)| *v);
    let global = frontier
        .best_bound()
        .max(z.unwrap_or(f64::NEG_INFINITY))
        .max(inc.unwrap_or(f64::NEG_INFINITY));
    log.push(NodeRecord {
        id: node.id,
        depth: node.depth,
        lp_bound: z.map(|v| sign * v),
        incumbent: inc.map(|v| sign * v),
        global_bound: sign * global,
    });
}
