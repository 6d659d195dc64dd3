//! TOML instance and solution documents.
//!
//! ```toml
//! problem = "mpp"          # mpp | mmcr | qcop | otp
//! vertices = 3
//! edges = [[0, 1], [1, 2]]
//! starts = [0, 1]
//! goals = [1, 2]
//! k = 1                    # mpp only
//! groups = [[0, 1]]        # mpp only, optional
//! obstacles = [[0, 1]]     # mmcr only
//! edge_costs = [[0, 1, 1.0], [1, 2, 1.0]]   # qcop/otp; unit costs if absent
//! rewards = [1.0, 1.0, 1.0]                # qcop
//! rates = [1.0, 1.0, 1.0]                  # otp
//! budget = 3.0                             # qcop/otp
//! ```
//!
//! Vertices are 0-based. Saving is deterministic and `load(save(x)) == x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Path};
use crate::instance::{MmcrInstance, MppInstance, ProblemInstance, RcpInstance, RcpVariant};
use crate::solution::{Solution, SolutionStats};
use crate::solver::SolveStatus;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    problem: String,
    vertices: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    starts: Vec<usize>,
    #[serde(default)]
    goals: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    groups: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    obstacles: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edge_costs: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    rewards: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    rates: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<f64>,
}

pub(crate) fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let line = e
        .span()
        .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
    let message = e.message().to_string();
    let field = message.split('`').nth(1).map(str::to_string);
    Error::Parse {
        line,
        field,
        message,
    }
}

fn forbid(present: bool, field: &str, problem: &str) -> Result<()> {
    if present {
        Err(Error::field(
            field,
            format!("not allowed for problem `{problem}`"),
        ))
    } else {
        Ok(())
    }
}

pub fn load_instance(text: &str) -> Result<ProblemInstance> {
    let doc: InstanceDoc = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    let graph = Graph::new(doc.vertices, &doc.edges)?;
    let p = doc.problem.as_str();
    match p {
        "mpp" => {
            forbid(!doc.obstacles.is_empty(), "obstacles", p)?;
            forbid(!doc.edge_costs.is_empty(), "edge_costs", p)?;
            forbid(
                !doc.rewards.is_empty() || !doc.rates.is_empty(),
                "rewards",
                p,
            )?;
            forbid(doc.budget.is_some(), "budget", p)?;
            let k = doc.k.ok_or_else(|| Error::field("k", "missing"))?;
            Ok(ProblemInstance::Mpp(MppInstance::new(
                graph, doc.starts, doc.goals, k, doc.groups,
            )?))
        }
        "mmcr" => {
            forbid(doc.k.is_some(), "k", p)?;
            forbid(!doc.groups.is_empty(), "groups", p)?;
            forbid(!doc.edge_costs.is_empty(), "edge_costs", p)?;
            forbid(
                !doc.rewards.is_empty() || !doc.rates.is_empty(),
                "rewards",
                p,
            )?;
            forbid(doc.budget.is_some(), "budget", p)?;
            Ok(ProblemInstance::Mmcr(MmcrInstance::new(
                graph,
                doc.starts,
                doc.goals,
                doc.obstacles,
            )?))
        }
        "qcop" | "otp" => {
            forbid(doc.k.is_some(), "k", p)?;
            forbid(!doc.groups.is_empty(), "groups", p)?;
            forbid(!doc.obstacles.is_empty(), "obstacles", p)?;
            let budget = doc
                .budget
                .ok_or_else(|| Error::field("budget", "missing"))?;
            let costs = edge_costs(&graph, &doc.edge_costs)?;
            let variant = if p == "qcop" {
                forbid(!doc.rates.is_empty(), "rates", p)?;
                RcpVariant::Qcop {
                    rewards: doc.rewards,
                }
            } else {
                forbid(!doc.rewards.is_empty(), "rewards", p)?;
                RcpVariant::Otp { rates: doc.rates }
            };
            Ok(ProblemInstance::Rcp(RcpInstance::new(
                graph, costs, budget, doc.starts, doc.goals, variant,
            )?))
        }
        other => Err(Error::field(
            "problem",
            format!("unknown problem `{other}`"),
        )),
    }
}

fn edge_costs(graph: &Graph, triples: &[(usize, usize, f64)]) -> Result<Vec<f64>> {
    if triples.is_empty() {
        return Ok(vec![1.0; graph.edge_count()]);
    }
    let mut costs = vec![None; graph.edge_count()];
    for &(a, b, c) in triples {
        let i = graph
            .edge_index(a, b)
            .ok_or_else(|| Error::field("edge_costs", format!("({a}, {b}) is not an edge")))?;
        if costs[i].replace(c).is_some() {
            return Err(Error::field(
                "edge_costs",
                format!("edge ({a}, {b}) listed twice"),
            ));
        }
    }
    costs
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                let (a, b) = graph.edges()[i];
                Error::field("edge_costs", format!("no cost for edge ({a}, {b})"))
            })
        })
        .collect()
}

pub fn save_instance(instance: &ProblemInstance) -> String {
    let g = instance.graph();
    let mut doc = InstanceDoc {
        problem: instance.problem_name().to_string(),
        vertices: g.vertex_count(),
        edges: g.edges().to_vec(),
        ..InstanceDoc::default()
    };
    match instance {
        ProblemInstance::Mpp(i) => {
            doc.starts = i.starts.clone();
            doc.goals = i.goals.clone();
            doc.k = Some(i.k);
            doc.groups = i.groups.clone();
        }
        ProblemInstance::Mmcr(i) => {
            doc.starts = i.starts.clone();
            doc.goals = i.goals.clone();
            doc.obstacles = i.obstacles.clone();
        }
        ProblemInstance::Rcp(i) => {
            doc.starts = i.starts.clone();
            doc.goals = i.goals.clone();
            doc.edge_costs = g
                .edges()
                .iter()
                .zip(&i.edge_costs)
                .map(|(&(a, b), &c)| (a, b, c))
                .collect();
            doc.budget = Some(i.budget);
            match &i.variant {
                RcpVariant::Qcop { rewards } => doc.rewards = rewards.clone(),
                RcpVariant::Otp { rates } => doc.rates = rates.clone(),
            }
        }
    }
    toml::to_string(&doc).expect("instance documents always serialize")
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct StatsDoc {
    variable_count: usize,
    constraint_count: usize,
    branch_nodes: usize,
    wall_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct SolutionDoc {
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    makespan: Option<usize>,
    #[serde(default)]
    paths: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    removed_obstacles: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reward: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dwell_times: Vec<f64>,
    #[serde(default)]
    stats: StatsDoc,
}

pub fn save_solution(solution: &Solution) -> String {
    let s = &solution.stats;
    let doc = SolutionDoc {
        status: solution.status.as_str().to_string(),
        objective: solution.objective,
        makespan: solution.makespan,
        paths: solution.paths.iter().map(|p| p.vertices.clone()).collect(),
        removed_obstacles: solution.removed_obstacles.clone(),
        reward: solution.reward,
        dwell_times: solution.dwell_times.clone(),
        stats: StatsDoc {
            variable_count: s.variable_count,
            constraint_count: s.constraint_count,
            branch_nodes: s.branch_nodes,
            wall_time: s.wall_time,
        },
    };
    toml::to_string(&doc).expect("solution documents always serialize")
}

pub fn load_solution(text: &str) -> Result<Solution> {
    let doc: SolutionDoc = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
    let status = SolveStatus::parse(&doc.status)
        .ok_or_else(|| Error::field("status", format!("unknown status `{}`", doc.status)))?;
    Ok(Solution {
        status,
        paths: doc.paths.into_iter().map(Path::new).collect(),
        makespan: doc.makespan,
        removed_obstacles: doc.removed_obstacles,
        reward: doc.reward,
        dwell_times: doc.dwell_times,
        objective: doc.objective,
        stats: SolutionStats {
            variable_count: doc.stats.variable_count,
            constraint_count: doc.stats.constraint_count,
            branch_nodes: doc.stats.branch_nodes,
            wall_time: doc.stats.wall_time,
        },
    })
}
