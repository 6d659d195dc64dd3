//! Exhaustive enumeration of integer assignments with row-activity pruning.
//! This is deliberately independent of the LP machinery in `solver` and is
//! used as ground truth in tests.

use super::{IpModel, ObjectiveSense, Sense};
use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

/// Calls `visit` with every feasible assignment (in lexicographic order of
/// variable values). Stops early when `visit` returns `false`. Returns the
/// number of feasible assignments visited.
pub fn enumerate_feasible(model: &IpModel, mut visit: impl FnMut(&[f64]) -> bool) -> Result<usize> {
    let vars = model.variables();
    if let Some(v) = vars.iter().find(|v| !v.is_integral()) {
        return Err(Error::Model(format!(
            "cannot enumerate continuous variable {}",
            v.name
        )));
    }
    let n = vars.len();
    let rows = model.constraints();
    let mut incidence: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut rem_min = vec![0.0; rows.len()];
    let mut rem_max = vec![0.0; rows.len()];
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in &row.terms {
            incidence[v.0].push((r, c));
            let (lo, hi) = (c * vars[v.0].lower(), c * vars[v.0].upper());
            rem_min[r] += lo.min(hi);
            rem_max[r] += lo.max(hi);
        }
    }
    // rows without terms are decided up front
    if rows
        .iter()
        .any(|row| row.terms.is_empty() && !row_possible(row.sense, row.rhs, 0.0, 0.0, 0.0))
    {
        return Ok(0);
    }

    struct State<'a, F> {
        model: &'a IpModel,
        incidence: Vec<Vec<(usize, f64)>>,
        fixed: Vec<f64>,
        rem_min: Vec<f64>,
        rem_max: Vec<f64>,
        values: Vec<f64>,
        visit: F,
        count: usize,
        stop: bool,
    }

    fn recurse<F: FnMut(&[f64]) -> bool>(s: &mut State<'_, F>, i: usize) {
        if s.stop {
            return;
        }
        let vars = s.model.variables();
        if i == vars.len() {
            s.count += 1;
            if !(s.visit)(&s.values) {
                s.stop = true;
            }
            return;
        }
        let (lo, hi) = (vars[i].lower() as i64, vars[i].upper() as i64);
        for value in lo..=hi {
            let x = value as f64;
            let mut ok = true;
            for k in 0..s.incidence[i].len() {
                let (r, c) = s.incidence[i][k];
                let (a, b) = (c * lo as f64, c * hi as f64);
                s.fixed[r] += c * x;
                s.rem_min[r] -= a.min(b);
                s.rem_max[r] -= a.max(b);
                let row = &s.model.constraints()[r];
                if !row_possible(row.sense, row.rhs, s.fixed[r], s.rem_min[r], s.rem_max[r]) {
                    ok = false;
                }
            }
            if ok {
                s.values[i] = x;
                recurse(s, i + 1);
            }
            for k in 0..s.incidence[i].len() {
                let (r, c) = s.incidence[i][k];
                let (a, b) = (c * lo as f64, c * hi as f64);
                s.fixed[r] -= c * x;
                s.rem_min[r] += a.min(b);
                s.rem_max[r] += a.max(b);
            }
            if s.stop {
                return;
            }
        }
        s.values[i] = 0.0;
    }

    let mut state = State {
        model,
        incidence,
        fixed: vec![0.0; rows.len()],
        rem_min,
        rem_max,
        values: vec![0.0; n],
        visit: &mut visit,
        count: 0,
        stop: false,
    };
    recurse(&mut state, 0);
    Ok(state.count)
}

fn row_possible(sense: Sense, rhs: f64, fixed: f64, rem_min: f64, rem_max: f64) -> bool {
    let tol = TOL * (1.0 + rhs.abs());
    match sense {
        Sense::Le => fixed + rem_min <= rhs + tol,
        Sense::Ge => fixed + rem_max >= rhs - tol,
        Sense::Eq => fixed + rem_min <= rhs + tol && fixed + rem_max >= rhs - tol,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    pub objective: f64,
    pub assignment: Vec<f64>,
    pub feasible_count: usize,
}

/// Best objective over all feasible assignments (first optimum in
/// lexicographic order), or `None` when infeasible.
pub fn brute_force_optimum(model: &IpModel) -> Result<Option<BruteForceOptimum>> {
    let maximize = model.objective().sense == ObjectiveSense::Maximize;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let count = enumerate_feasible(model, |values| {
        let obj = model.evaluate_objective(values);
        let better = match &best {
            None => true,
            Some((b, _)) => {
                if maximize {
                    obj > *b + 1e-12
                } else {
                    obj < *b - 1e-12
                }
            }
        };
        if better {
            best = Some((obj, values.to_vec()));
        }
        true
    })?;
    Ok(best.map(|(objective, assignment)| BruteForceOptimum {
        objective,
        assignment,
        feasible_count: count,
    }))
}

#[cfg(test)]
mod tests {
    use super::super::{IpModel, ObjectiveSense, Sense, VarKind};
    use super::*;

    #[test]
    fn knapsack_by_enumeration() {
        let mut m = IpModel::new();
        let x: Vec<_> = (0..3).map(|i| m.add_binary(format!("x{i}"))).collect();
        m.add_constraint(
            "cap",
            [(2.0, x[0]), (3.0, x[1]), (4.0, x[2])],
            Sense::Le,
            6.0,
        )
        .unwrap();
        m.set_objective(
            ObjectiveSense::Maximize,
            [(3.0, x[0]), (4.0, x[1]), (5.0, x[2])],
        )
        .unwrap();
        let best = brute_force_optimum(&m).unwrap().unwrap();
        assert_eq!(best.objective, 8.0);
        assert_eq!(best.assignment, vec![1.0, 0.0, 1.0]);
        // feasible subsets of {2,3,4} with weight <= 6: {}, {0}, {1}, {2}, {0,1}, {0,2}
        assert_eq!(best.feasible_count, 6);
    }

    #[test]
    fn counts_integer_points() {
        let mut m = IpModel::new();
        let u = m
            .add_variable(VarKind::Integer { lower: 3, upper: 5 }, "u")
            .unwrap();
        let w = m
            .add_variable(VarKind::Integer { lower: 3, upper: 5 }, "w")
            .unwrap();
        m.add_constraint("lt", [(1.0, u), (-1.0, w)], Sense::Le, -1.0)
            .unwrap();
        assert_eq!(enumerate_feasible(&m, |_| true).unwrap(), 3);
    }

    #[test]
    fn contradictory_equalities() {
        let mut m = IpModel::new();
        let x = m.add_binary("x0");
        m.add_constraint("a", [(1.0, x)], Sense::Eq, 1.0).unwrap();
        m.add_constraint("b", [(1.0, x)], Sense::Eq, 0.0).unwrap();
        assert!(brute_force_optimum(&m).unwrap().is_none());
    }
}
