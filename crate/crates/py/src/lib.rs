//! Python bindings. Instances and solutions cross the boundary as TOML
//! documents (the same format the `pathip` command line reads), results come
//! back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use pathip_core::bench::parse_heuristic;
use pathip_core::generate::{generate_instance, GeneratorSpec};
use pathip_core::io::{load_instance, load_solution, save_instance, save_solution};
use pathip_core::mmcr::{solve_mmcr, MmcrConfig};
use pathip_core::model::parse_lp;
use pathip_core::mpp::{solve_mpp, underestimate_t, MppConfig};
use pathip_core::oracle::{mmcr_oracle_set, mpp_oracle, rcp_oracle};
use pathip_core::rcp::{choose_horizon, solve_rcp, RcpConfig};
use pathip_core::solution::Solution;
use pathip_core::solver::{solve as solve_model, BackendChoice, SolveConfig};
use pathip_core::validate::{validate_mmcr_solution, validate_mpp_solution, validate_rcp_solution};
use pathip_core::{MppInstance, ProblemInstance};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(text: &str) -> PyResult<ProblemInstance> {
    load_instance(text).map_err(err)
}

fn solver_config(time_limit: Option<f64>, backend: Option<&str>) -> PyResult<SolveConfig> {
    let mut config = SolveConfig::default();
    if let Some(t) = time_limit {
        config.time_limit = t;
    }
    if let Some(b) = backend {
        config.backend = BackendChoice::parse(b).map_err(err)?;
    }
    Ok(config)
}

fn solution_dict<'py>(py: Python<'py>, sol: &Solution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("status", sol.status.as_str())?;
    let paths: Vec<Vec<usize>> = sol.paths.iter().map(|p| p.vertices.clone()).collect();
    d.set_item("paths", paths)?;
    d.set_item("makespan", sol.makespan)?;
    d.set_item("removed_obstacles", sol.removed_obstacles.clone())?;
    d.set_item("reward", sol.reward)?;
    d.set_item("dwell_times", sol.dwell_times.clone())?;
    d.set_item("objective", sol.objective)?;
    d.set_item("variable_count", sol.stats.variable_count)?;
    d.set_item("constraint_count", sol.stats.constraint_count)?;
    d.set_item("branch_nodes", sol.stats.branch_nodes)?;
    d.set_item("wall_time", sol.stats.wall_time)?;
    d.set_item("document", save_solution(sol))?;
    Ok(d)
}

/// Problem name of an instance document: "mpp", "mmcr", "qcop" or "otp".
#[pyfunction]
fn problem_of(instance: &str) -> PyResult<String> {
    let text = save_instance(&load(instance)?);
    let first = text.lines().next().unwrap_or_default();
    Ok(first
        .trim_start_matches("problem = ")
        .trim_matches('"')
        .to_string())
}

/// Solves an instance document. Keyword options only apply to the problems
/// that have them.
#[pyfunction]
#[pyo3(signature = (instance, *, k=None, heuristic=None, fallback=true, max_t=None,
                    budget=None, horizon=None, seed=0, time_limit=None, backend=None))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    instance: &str,
    k: Option<usize>,
    heuristic: Option<&str>,
    fallback: bool,
    max_t: Option<usize>,
    budget: Option<f64>,
    horizon: Option<usize>,
    seed: u64,
    time_limit: Option<f64>,
    backend: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let solver = solver_config(time_limit, backend)?;
    let sol = match load(instance)? {
        ProblemInstance::Mpp(mut m) => {
            if let Some(k) = k {
                m = MppInstance::new(m.graph, m.starts, m.goals, k, m.groups).map_err(err)?;
            }
            let mut config = MppConfig {
                fallback_to_exact: fallback,
                max_t,
                ..MppConfig::default()
            };
            config.solver = SolveConfig {
                node_order: config.solver.node_order,
                ..solver
            };
            if let Some(h) = heuristic {
                config.heuristic = parse_heuristic(h).map_err(err)?;
            }
            py.allow_threads(|| solve_mpp(&m, &config))
        }
        ProblemInstance::Mmcr(m) => {
            py.allow_threads(|| solve_mmcr(&m, &MmcrConfig { seed, solver }))
        }
        ProblemInstance::Rcp(mut r) => {
            if let Some(b) = budget {
                r.budget = b;
                r.validate().map_err(err)?;
            }
            let config = RcpConfig {
                horizon,
                solver,
                ..RcpConfig::default()
            };
            py.allow_threads(|| solve_rcp(&r, &config))
        }
    }
    .map_err(err)?;
    solution_dict(py, &sol)
}

/// Checks a solution document against an instance. Returns the list of
/// violations, empty when the solution is valid.
#[pyfunction]
fn verify(instance: &str, solution: &str) -> PyResult<Vec<String>> {
    let sol = load_solution(solution).map_err(err)?;
    let verdict = match load(instance)? {
        ProblemInstance::Mpp(m) => validate_mpp_solution(&m, &sol),
        ProblemInstance::Mmcr(m) => validate_mmcr_solution(&m, &sol),
        ProblemInstance::Rcp(r) => validate_rcp_solution(&r, &sol),
    };
    Ok(verdict.violations.iter().map(|v| v.to_string()).collect())
}

/// Brute-force optimum. Returns None when no solution exists within the cap.
#[pyfunction]
#[pyo3(signature = (instance, max_t=None))]
fn oracle<'py>(
    py: Python<'py>,
    instance: &str,
    max_t: Option<usize>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let d = PyDict::new_bound(py);
    match load(instance)? {
        ProblemInstance::Mpp(m) => {
            let cap = match max_t {
                Some(t) => t,
                None => underestimate_t(&m).map_err(err)? + 2 * m.graph.vertex_count(),
            };
            match py.allow_threads(|| mpp_oracle(&m, cap)).map_err(err)? {
                Some(t) => d.set_item("makespan", t)?,
                None => return Ok(None),
            }
        }
        ProblemInstance::Mmcr(m) => {
            let set = py.allow_threads(|| mmcr_oracle_set(&m)).map_err(err)?;
            d.set_item("removed_count", set.len())?;
            d.set_item("removed_obstacles", set)?;
        }
        ProblemInstance::Rcp(r) => {
            let cap = match max_t {
                Some(t) => t,
                None => choose_horizon(&r).map_err(err)?,
            };
            match py.allow_threads(|| rcp_oracle(&r, cap)).map_err(err)? {
                Some(best) => {
                    d.set_item("reward", best.reward)?;
                    d.set_item("walk", best.walk.vertices)?;
                    d.set_item("dwell_times", best.dwell)?;
                }
                None => return Ok(None),
            }
        }
    }
    Ok(Some(d))
}

/// Random instance document, e.g.
/// `generate("mpp", 1, rows=5, cols=5, removal=0.1, n=3)`.
#[pyfunction]
#[pyo3(signature = (problem, seed, **params))]
fn generate(problem: &str, seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<String> {
    let mut table = toml::Table::new();
    table.insert("problem".into(), problem.into());
    if let Some(params) = params {
        for (key, value) in params.iter() {
            let key: String = key.extract()?;
            let value = if value.is_none() {
                continue;
            } else if let Ok(i) = value.extract::<i64>() {
                toml::Value::Integer(i)
            } else if let Ok(f) = value.extract::<f64>() {
                toml::Value::Float(f)
            } else {
                return Err(PyValueError::new_err(format!("{key}: expected a number")));
            };
            table.insert(key, value);
        }
    }
    let spec: GeneratorSpec = toml::Value::Table(table).try_into().map_err(err)?;
    Ok(save_instance(&generate_instance(&spec, seed).map_err(err)?))
}

/// Solves a model in LP text format. Returns (status, objective, {name: value}).
#[pyfunction]
#[pyo3(signature = (text, time_limit=None))]
fn solve_lp<'py>(
    py: Python<'py>,
    text: &str,
    time_limit: Option<f64>,
) -> PyResult<(String, Option<f64>, Bound<'py, PyDict>)> {
    let model = parse_lp(text).map_err(err)?;
    let config = solver_config(time_limit, None)?;
    let out = py
        .allow_threads(|| solve_model(&model, &config))
        .map_err(err)?;
    let values = PyDict::new_bound(py);
    for (i, v) in out.values.iter().enumerate() {
        values.set_item(&model.variable(pathip_core::model::VarId(i)).name, *v)?;
    }
    Ok((out.status.as_str().to_string(), out.objective, values))
}

#[pymodule]
fn pathip(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(problem_of, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lp, m)?)?;
    m.add(
        "__all__",
        PyList::new_bound(
            m.py(),
            [
                "problem_of",
                "solve",
                "verify",
                "oracle",
                "generate",
                "solve_lp",
            ],
        ),
    )?;
    Ok(())
}
