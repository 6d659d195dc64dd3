//! Pluggable solver backends.
//!
//! The external adapter writes the model with [`write_lp`] and runs
//! `<command...> <model.lp> <solution.sol>`. The command must write a
//! solution file of the form
//!
//! ```text
//! status optimal|feasible|infeasible|unbounded|timeout
//! objective <number>
//! <variable-name> <value>
//! ...
//! ```
//!
//! Variables missing from the file are read as 0. The exit status of the
//! command is only consulted when it leaves no solution file behind.

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use super::{solve, SolveConfig, SolveOutcome, SolveStats, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{fmt_num, write_lp, IpModel};

pub trait Backend {
    fn name(&self) -> String;
    fn solve(&self, model: &IpModel, config: &SolveConfig) -> Result<SolveOutcome>;
}

/// The built-in branch-and-bound engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct Embedded;

impl Backend for Embedded {
    fn name(&self) -> String {
        "embedded".into()
    }

    fn solve(&self, model: &IpModel, config: &SolveConfig) -> Result<SolveOutcome> {
        solve(model, config)
    }
}

#[derive(Debug, Clone)]
pub struct ExternalProcess {
    /// Program followed by its leading arguments, split on whitespace.
    pub command: String,
}

impl ExternalProcess {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
        }
    }
}

impl Backend for ExternalProcess {
    fn name(&self) -> String {
        format!("external:{}", self.command)
    }

    fn solve(&self, model: &IpModel, config: &SolveConfig) -> Result<SolveOutcome> {
        config.validate()?;
        let start = Instant::now();
        let mut parts = self.command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| Error::Solver("empty external solver command".into()))?;
        let dir = tempfile::tempdir()?;
        let lp_path = dir.path().join("model.lp");
        let sol_path = dir.path().join("solution.sol");
        std::fs::write(&lp_path, write_lp(model))?;
        let status = Command::new(program)
            .args(parts)
            .arg(&lp_path)
            .arg(&sol_path)
            .status()
            .map_err(|e| Error::Solver(format!("cannot run `{program}`: {e}")))?;
        let Ok(text) = std::fs::read_to_string(&sol_path) else {
            return Err(Error::Solver(format!(
                "`{}` exited with {status} without writing a solution",
                self.command
            )));
        };
        let mut outcome = parse_solution_file(model, &text)?;
        outcome.stats.wall_time = start.elapsed().as_secs_f64();
        Ok(outcome)
    }
}

pub fn write_solution_file(model: &IpModel, outcome: &SolveOutcome) -> String {
    let mut out = format!("status {}\n", outcome.status.as_str());
    if let Some(obj) = outcome.objective {
        out.push_str(&format!("objective {}\n", fmt_num(obj)));
    }
    for (var, value) in model.variables().iter().zip(&outcome.values) {
        out.push_str(&format!("{} {}\n", var.name, fmt_num(*value)));
    }
    out
}

pub fn parse_solution_file(model: &IpModel, text: &str) -> Result<SolveOutcome> {
    let index: HashMap<&str, usize> = model
        .variables()
        .iter()
        .map(|v| (v.name.as_str(), v.id.0))
        .collect();
    let mut status = None;
    let mut objective = None;
    let mut values = vec![0.0; model.variable_count()];
    let err = |line: usize, msg: String| Error::Parse {
        line: Some(line),
        field: None,
        message: msg,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(i + 1, format!("bad line `{line}`")))?;
        let value = value.trim();
        match key {
            "status" => {
                status = Some(
                    SolveStatus::parse(value)
                        .ok_or_else(|| err(i + 1, format!("unknown status `{value}`")))?,
                )
            }
            "objective" => {
                objective = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| err(i + 1, "bad objective".into()))?,
                )
            }
            name => {
                let id = *index
                    .get(name)
                    .ok_or_else(|| err(i + 1, format!("unknown variable `{name}`")))?;
                values[id] = value
                    .parse()
                    .map_err(|_| err(i + 1, format!("bad value for `{name}`")))?;
            }
        }
    }
    let status = status.ok_or_else(|| Error::Parse {
        line: None,
        field: Some("status".into()),
        message: "missing".into(),
    })?;
    if !status.has_solution() {
        values.clear();
        objective = None;
    } else if objective.is_none() {
        objective = Some(model.evaluate_objective(&values));
    }
    Ok(SolveOutcome {
        status,
        values,
        objective,
        bound: objective.unwrap_or(f64::NAN),
        stats: SolveStats::default(),
        node_log: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjectiveSense, Sense};

    #[test]
    fn solution_file_round_trip() {
        let mut m = IpModel::new();
        let x = m.add_binary("x[0]");
        let y = m.add_binary("x[1]");
        m.add_constraint("c", [(1.0, x), (1.0, y)], Sense::Le, 1.0)
            .unwrap();
        m.set_objective(ObjectiveSense::Maximize, [(2.0, x), (1.0, y)])
            .unwrap();
        let out = Embedded.solve(&m, &SolveConfig::default()).unwrap();
        let text = write_solution_file(&m, &out);
        assert!(text.starts_with("status optimal\nobjective 2\n"));
        let back = parse_solution_file(&m, &text).unwrap();
        assert_eq!(back.values, out.values);
        assert_eq!(back.objective, Some(2.0));
    }

    #[test]
    fn unknown_variable_rejected() {
        let m = IpModel::new();
        assert!(parse_solution_file(&m, "status optimal\nzz 1\n").is_err());
    }
}
