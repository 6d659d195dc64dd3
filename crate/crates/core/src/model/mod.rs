//! Integer-programming model container.
//!
//! A model holds bounded variables, linear constraints and an objective that
//! may carry products of binary variables. Products are removed with
//! [`IpModel::linearize`] before a model is handed to a linear engine.

mod brute_force;
mod lp_format;

pub use brute_force::{brute_force_optimum, enumerate_feasible, BruteForceOptimum};
pub use lp_format::{parse_lp, write_lp};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarKind {
    Binary,
    Integer { lower: i64, upper: i64 },
    Continuous { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: VarId,
    pub kind: VarKind,
    pub name: String,
}

impl Variable {
    pub fn lower(&self) -> f64 {
        match self.kind {
            VarKind::Binary => 0.0,
            VarKind::Integer { lower, .. } => lower as f64,
            VarKind::Continuous { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match self.kind {
            VarKind::Binary => 1.0,
            VarKind::Integer { upper, .. } => upper as f64,
            VarKind::Continuous { upper, .. } => upper,
        }
    }

    pub fn is_integral(&self) -> bool {
        !matches!(self.kind, VarKind::Continuous { .. })
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.kind, VarKind::Binary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    /// `(coefficient, variable)` pairs, sorted by variable and free of
    /// duplicates and zero coefficients.
    pub terms: Vec<(f64, VarId)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(c, v)| c * values[v.0]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => a <= self.rhs + tol,
            Sense::Ge => a >= self.rhs - tol,
            Sense::Eq => (a - self.rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: ObjectiveSense,
    pub linear: Vec<(f64, VarId)>,
    pub quadratic: Vec<(f64, VarId, VarId)>,
}

impl Default for Objective {
    fn default() -> Self {
        Self {
            sense: ObjectiveSense::Minimize,
            linear: Vec::new(),
            quadratic: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IpModel {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Objective,
}

impl IpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn find_variable(&self, name: &str) -> Option<VarId> {
        self.variables.iter().find(|v| v.name == name).map(|v| v.id)
    }

    pub fn add_variable(&mut self, kind: VarKind, name: impl Into<String>) -> Result<VarId> {
        let name = name.into();
        let kind = normalize_kind(kind, &name)?;
        let id = VarId(self.variables.len());
        self.variables.push(Variable { id, kind, name });
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_variable(VarKind::Binary, name)
            .expect("binary variables are always valid")
    }

    /// Tightens or replaces the bounds of a variable, keeping its kind.
    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<()> {
        let var = self
            .variables
            .get_mut(id.0)
            .ok_or_else(|| Error::Model(format!("unknown variable {id}")))?;
        let kind = match var.kind {
            VarKind::Binary | VarKind::Integer { .. } => {
                if lower.fract() != 0.0 || upper.fract() != 0.0 {
                    return Err(Error::Model(format!(
                        "fractional bounds for integer variable {}",
                        var.name
                    )));
                }
                VarKind::Integer {
                    lower: lower as i64,
                    upper: upper as i64,
                }
            }
            VarKind::Continuous { .. } => VarKind::Continuous { lower, upper },
        };
        var.kind = normalize_kind(kind, &var.name)?;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (f64, VarId)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize> {
        let terms = self.merge_terms(terms)?;
        if !rhs.is_finite() {
            return Err(Error::Model(
                "constraint right-hand side must be finite".into(),
            ));
        }
        self.constraints.push(LinearConstraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(
        &mut self,
        sense: ObjectiveSense,
        linear: impl IntoIterator<Item = (f64, VarId)>,
    ) -> Result<()> {
        let linear = self.merge_terms(linear)?;
        self.objective = Objective {
            sense,
            linear,
            quadratic: Vec::new(),
        };
        Ok(())
    }

    pub fn add_quadratic_term(&mut self, coefficient: f64, a: VarId, b: VarId) -> Result<()> {
        self.check_id(a)?;
        self.check_id(b)?;
        if coefficient != 0.0 {
            self.objective.quadratic.push((coefficient, a, b));
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.objective.quadratic.is_empty()
    }

    fn check_id(&self, id: VarId) -> Result<()> {
        if id.0 < self.variables.len() {
            Ok(())
        } else {
            Err(Error::Model(format!("unknown variable {id}")))
        }
    }

    fn merge_terms(
        &self,
        terms: impl IntoIterator<Item = (f64, VarId)>,
    ) -> Result<Vec<(f64, VarId)>> {
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for (c, v) in terms {
            self.check_id(v)?;
            if !c.is_finite() {
                return Err(Error::Model(format!(
                    "non-finite coefficient on {}",
                    self.variables[v.0].name
                )));
            }
            *merged.entry(v).or_insert(0.0) += c;
        }
        Ok(merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(v, c)| (c, v))
            .collect())
    }

    /// Objective value, including products, at a full assignment.
    pub fn evaluate_objective(&self, values: &[f64]) -> f64 {
        let linear: f64 = self
            .objective
            .linear
            .iter()
            .map(|&(c, v)| c * values[v.0])
            .sum();
        let quad: f64 = self
            .objective
            .quadratic
            .iter()
            .map(|&(c, a, b)| c * values[a.0] * values[b.0])
            .sum();
        linear + quad
    }

    /// Indices of constraints violated by `values`.
    pub fn violated_constraints(&self, values: &[f64], tol: f64) -> Vec<usize> {
        (0..self.constraints.len())
            .filter(|&i| !self.constraints[i].is_satisfied(values, tol))
            .collect()
    }

    /// Bounds, integrality and every constraint hold within `tol`.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.variables.len()
            && self.variables.iter().all(|var| {
                let x = values[var.id.0];
                x >= var.lower() - tol
                    && x <= var.upper() + tol
                    && (!var.is_integral() || (x - x.round()).abs() <= tol)
            })
            && self.constraints.iter().all(|c| c.is_satisfied(values, tol))
    }

    /// Every variable bounded by finite values and every quadratic term over
    /// binaries.
    pub fn validate(&self) -> Result<()> {
        for var in &self.variables {
            if !var.lower().is_finite() || !var.upper().is_finite() {
                return Err(Error::Model(format!("variable {} is unbounded", var.name)));
            }
        }
        for &(_, a, b) in &self.objective.quadratic {
            for id in [a, b] {
                if !self.variables[id.0].is_binary() {
                    return Err(Error::Model(format!(
                        "quadratic term over non-binary variable {}",
                        self.variables[id.0].name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Replaces every product of two binaries by a fresh binary `y` with
    /// `y <= a`, `y <= b`, `y >= a + b - 1`. Products of a variable with
    /// itself collapse to the variable. Products over the same unordered pair
    /// share one `y`.
    pub fn linearize(&self) -> Result<IpModel> {
        self.validate()?;
        let mut out = self.clone();
        if self.objective.quadratic.is_empty() {
            return Ok(out);
        }
        out.objective.quadratic.clear();
        let mut linear: Vec<(f64, VarId)> = self.objective.linear.clone();
        let mut pairs: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();
        for &(c, a, b) in &self.objective.quadratic {
            if a == b {
                linear.push((c, a));
            } else {
                *pairs.entry((a.min(b), a.max(b))).or_insert(0.0) += c;
            }
        }
        for ((a, b), c) in pairs {
            if c == 0.0 {
                continue;
            }
            let (na, nb) = (
                self.variables[a.0].name.clone(),
                self.variables[b.0].name.clone(),
            );
            let y = out.add_binary(format!("y[{na}*{nb}]"));
            out.add_constraint(
                format!("mc1[{na}*{nb}]"),
                [(1.0, y), (-1.0, a)],
                Sense::Le,
                0.0,
            )?;
            out.add_constraint(
                format!("mc2[{na}*{nb}]"),
                [(1.0, y), (-1.0, b)],
                Sense::Le,
                0.0,
            )?;
            out.add_constraint(
                format!("mc3[{na}*{nb}]"),
                [(1.0, y), (-1.0, a), (-1.0, b)],
                Sense::Ge,
                -1.0,
            )?;
            linear.push((c, y));
        }
        out.objective.linear = out.merge_terms(linear)?;
        Ok(out)
    }

    /// The same model with a zero objective, used for pure feasibility checks.
    pub fn without_objective(&self) -> IpModel {
        let mut out = self.clone();
        out.objective = Objective {
            sense: self.objective.sense,
            linear: Vec::new(),
            quadratic: Vec::new(),
        };
        out
    }

    /// Human-readable form of one constraint using variable names, e.g.
    /// `x[0][1][0][1] + x[1][1][1][0] <= 1`.
    pub fn format_constraint(&self, index: usize) -> String {
        let c = &self.constraints[index];
        format!(
            "{} {} {}",
            format_expr(&c.terms, |v| &self.variables[v.0].name),
            c.sense.symbol(),
            fmt_num(c.rhs)
        )
    }
}

fn normalize_kind(kind: VarKind, name: &str) -> Result<VarKind> {
    match kind {
        VarKind::Binary => Ok(VarKind::Binary),
        VarKind::Integer { lower, upper } => {
            if lower > upper {
                Err(Error::Model(format!(
                    "variable {name}: lower bound {lower} exceeds upper bound {upper}"
                )))
            } else if lower == 0 && upper == 1 {
                Ok(VarKind::Binary)
            } else {
                Ok(kind)
            }
        }
        VarKind::Continuous { lower, upper } => {
            if !lower.is_finite() || !upper.is_finite() {
                Err(Error::Model(format!(
                    "continuous variable {name} needs finite bounds"
                )))
            } else if lower > upper {
                Err(Error::Model(format!(
                    "variable {name}: lower bound {lower} exceeds upper bound {upper}"
                )))
            } else {
                Ok(kind)
            }
        }
    }
}

pub(crate) fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub(crate) fn format_expr<'a>(terms: &[(f64, VarId)], name: impl Fn(VarId) -> &'a str) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, &(c, v)) in terms.iter().enumerate() {
        let sign = if c < 0.0 { "-" } else { "+" };
        if i > 0 {
            s.push_str(&format!(" {sign} "));
        } else if c < 0.0 {
            s.push('-');
        }
        if c.abs() != 1.0 {
            s.push_str(&fmt_num(c.abs()));
            s.push(' ');
        }
        s.push_str(name(v));
    }
    s
}
