//! Benchmark harness: runs every method of a suite on generated instances and
//! emits one CSV row per (instance, method).
//!
//! Suite documents are TOML:
//!
//! ```toml
//! [[run]]
//! id = "tube-sweep"
//! instances = 20
//! seed = 1
//! methods = ["exact", "tube=1", "tube=2", "tube=3"]
//! solve = false            # build models only
//! oracle = false           # add the brute-force optimum where feasible
//! generator = { problem = "mpp", rows = 24, cols = 18, removal = 0.1, n = 30 }
//! ```
//!
//! Methods: `exact`, `tube=H` and `sphere=H` for path planning; `ip` for the
//! other problems.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate_instance, GeneratorSpec};
use crate::instance::ProblemInstance;
use crate::mmcr::{build_mmcr_model, solve_mmcr, MmcrConfig};
use crate::mpp::{build_mpp_model, solve_mpp, underestimate_t, Heuristic, MppConfig};
use crate::oracle::{mmcr_oracle, mpp_oracle, rcp_oracle, MMCR_OBSTACLE_CAP};
use crate::rcp::{build_otp, build_qcop, choose_horizon, solve_rcp, RcpConfig};
use crate::solver::SolveConfig;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 9] = [
    "instance_id",
    "method",
    "variable_count",
    "constraint_count",
    "objective",
    "nodes",
    "wall_time",
    "status",
    "oracle",
];

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub run: Vec<Run>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    pub id: String,
    pub generator: GeneratorSpec,
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    pub methods: Vec<String>,
    #[serde(default = "yes")]
    pub solve: bool,
    #[serde(default)]
    pub oracle: bool,
    /// Seconds per solve.
    #[serde(default)]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub method: String,
    pub variable_count: usize,
    pub constraint_count: usize,
    pub objective: Option<f64>,
    pub nodes: usize,
    pub wall_time: f64,
    pub status: String,
    pub oracle: Option<f64>,
}

impl BenchRow {
    fn failed(instance_id: &str, method: &str, err: &Error) -> Self {
        Self {
            instance_id: instance_id.to_string(),
            method: method.to_string(),
            variable_count: 0,
            constraint_count: 0,
            objective: None,
            nodes: 0,
            wall_time: 0.0,
            status: format!("error: {err}"),
            oracle: None,
        }
    }
}

pub fn parse_suite(text: &str) -> Result<Suite> {
    toml::from_str(text).map_err(|e| crate::io::toml_error(text, &e))
}

pub fn parse_heuristic(method: &str) -> Result<Heuristic> {
    let bad = || Error::Invalid(format!("unknown method `{method}`"));
    match method.split_once('=') {
        None if method == "exact" => Ok(Heuristic::None),
        Some(("tube", h)) => Ok(Heuristic::Tube(h.parse().map_err(|_| bad())?)),
        Some(("sphere", h)) => Ok(Heuristic::Sphere(h.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn oracle_value(instance: &ProblemInstance) -> Option<f64> {
    match instance {
        ProblemInstance::Mpp(m) => {
            let cap = underestimate_t(m).ok()? + 2 * m.graph.vertex_count();
            mpp_oracle(m, cap).ok().flatten().map(|t| t as f64)
        }
        ProblemInstance::Mmcr(m) if m.obstacles.len() <= MMCR_OBSTACLE_CAP => {
            mmcr_oracle(m).ok().map(|c| c as f64)
        }
        ProblemInstance::Mmcr(_) => None,
        ProblemInstance::Rcp(r) => rcp_oracle(r, choose_horizon(r).ok()?)
            .ok()
            .flatten()
            .map(|b| b.reward),
    }
}

fn run_method(
    instance: &ProblemInstance,
    method: &str,
    solve: bool,
    solver: &SolveConfig,
) -> Result<BenchRow> {
    let started = Instant::now();
    let mut row = BenchRow {
        instance_id: String::new(),
        method: method.to_string(),
        variable_count: 0,
        constraint_count: 0,
        objective: None,
        nodes: 0,
        wall_time: 0.0,
        status: "built".into(),
        oracle: None,
    };
    let sol = match instance {
        ProblemInstance::Mpp(m) => {
            let heuristic = parse_heuristic(method)?;
            let config = MppConfig {
                heuristic,
                solver: SolveConfig {
                    node_order: crate::solver::NodeOrder::DepthFirst,
                    ..solver.clone()
                },
                ..MppConfig::default()
            };
            if !solve {
                let built = build_mpp_model(m, underestimate_t(m)?, &config, heuristic)?;
                row.variable_count = built.model().variable_count();
                row.constraint_count = built.model().constraint_count();
                None
            } else {
                Some(solve_mpp(m, &config)?)
            }
        }
        ProblemInstance::Mmcr(m) => {
            if method != "ip" {
                return Err(Error::Invalid(format!("unknown method `{method}`")));
            }
            if !solve {
                let built = build_mmcr_model(m, 0)?;
                row.variable_count = built.model.variable_count();
                row.constraint_count = built.model.constraint_count();
                None
            } else {
                Some(solve_mmcr(
                    m,
                    &MmcrConfig {
                        seed: 0,
                        solver: solver.clone(),
                    },
                )?)
            }
        }
        ProblemInstance::Rcp(r) => {
            if method != "ip" {
                return Err(Error::Invalid(format!("unknown method `{method}`")));
            }
            let config = RcpConfig {
                solver: solver.clone(),
                ..RcpConfig::default()
            };
            if !solve {
                let t = choose_horizon(r)?;
                let enc = if r.is_otp() {
                    build_otp(r, t, config.reachability)?
                } else {
                    build_qcop(r, t, config.reachability)?
                };
                row.variable_count = enc.model.variable_count();
                row.constraint_count = enc.model.constraint_count();
                None
            } else {
                Some(solve_rcp(r, &config)?)
            }
        }
    };
    if let Some(sol) = sol {
        row.variable_count = sol.stats.variable_count;
        row.constraint_count = sol.stats.constraint_count;
        row.nodes = sol.stats.branch_nodes;
        row.objective = match instance {
            ProblemInstance::Rcp(_) => sol.reward,
            _ => sol.objective,
        };
        row.status = sol.status.as_str().to_string();
    }
    row.wall_time = started.elapsed().as_secs_f64();
    Ok(row)
}

/// Runs a whole suite. Failures become rows with an `error: ...` status.
/// A run's `time_limit` overrides the one in `base`.
pub fn run_suite(suite: &Suite, base: &SolveConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for run in &suite.run {
        let solver = SolveConfig {
            time_limit: run.time_limit.unwrap_or(base.time_limit),
            ..base.clone()
        };
        for i in 0..run.instances {
            let id = format!("{}-{i}", run.id);
            let instance = match generate_instance(&run.generator, run.seed + i as u64) {
                Ok(inst) => inst,
                Err(e) => {
                    rows.extend(run.methods.iter().map(|m| BenchRow::failed(&id, m, &e)));
                    continue;
                }
            };
            let oracle = if run.oracle {
                oracle_value(&instance)
            } else {
                None
            };
            for method in &run.methods {
                let mut row = run_method(&instance, method, run.solve, &solver)
                    .unwrap_or_else(|e| BenchRow::failed(&id, method, &e));
                row.instance_id = id.clone();
                row.oracle = oracle;
                rows.push(row);
            }
        }
    }
    rows
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_COLUMNS)
        .map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
