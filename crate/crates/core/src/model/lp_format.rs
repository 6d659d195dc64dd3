//! Plain-text LP export and import.
//!
//! Grammar (one item per line, sections in this order, blank lines and lines
//! starting with `\` ignored):
//!
//! ```text
//! Maximize | Minimize
//!  obj: <expr> [ + [ <coef> <name> * <name> ... ] ]
//! Subject To
//!  <row-name>: <expr> <= | >= | = <number>
//! Bounds
//!  <number> <= <name> <= <number>
//! General
//!  <name> ...
//! Binary
//!  <name> ...
//! End
//! ```
//!
//! `<expr>` is a sequence of `[+|-] [<coef>] <name>` terms, or `0`. Names are
//! whitespace-free tokens that do not start with a digit, sign or `.`.
//! Variables listed under `General` are integers, under `Binary` binaries,
//! all others continuous. Every non-binary variable has a `Bounds` line.
//! Variables are declared in the order of their first appearance in
//! `Bounds`/`Binary`, which the writer emits in id order.

use std::collections::HashMap;

use super::{fmt_num, format_expr, IpModel, ObjectiveSense, Sense, VarId, VarKind};
use crate::error::{Error, Result};

pub fn write_lp(model: &IpModel) -> String {
    let name = |v: VarId| model.variable(v).name.as_str();
    let mut out = String::new();
    out.push_str(match model.objective().sense {
        ObjectiveSense::Maximize => "Maximize\n",
        ObjectiveSense::Minimize => "Minimize\n",
    });
    out.push_str(" obj: ");
    out.push_str(&format_expr(&model.objective().linear, name));
    if !model.objective().quadratic.is_empty() {
        out.push_str(" + [");
        for &(c, a, b) in &model.objective().quadratic {
            out.push_str(&format!(" {} {} * {}", fmt_num(c), name(a), name(b)));
        }
        out.push_str(" ]");
    }
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let row_name = if c.name.is_empty() {
            format!("c{i}")
        } else {
            c.name.clone()
        };
        out.push_str(&format!(
            " {}: {} {} {}\n",
            row_name,
            format_expr(&c.terms, name),
            c.sense.symbol(),
            fmt_num(c.rhs)
        ));
    }
    out.push_str("Bounds\n");
    for v in model.variables() {
        match v.kind {
            VarKind::Binary => out.push_str(&format!(" 0 <= {} <= 1\n", v.name)),
            _ => out.push_str(&format!(
                " {} <= {} <= {}\n",
                fmt_num(v.lower()),
                v.name,
                fmt_num(v.upper())
            )),
        }
    }
    let generals: Vec<&str> = model
        .variables()
        .iter()
        .filter(|v| matches!(v.kind, VarKind::Integer { .. }))
        .map(|v| v.name.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("General\n");
        for g in generals {
            out.push_str(&format!(" {g}\n"));
        }
    }
    let binaries: Vec<&str> = model
        .variables()
        .iter()
        .filter(|v| v.is_binary())
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for b in binaries {
            out.push_str(&format!(" {b}\n"));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    General,
    Binary,
    End,
}

struct PendingVar {
    name: String,
    lower: f64,
    upper: f64,
    general: bool,
    binary: bool,
}

pub fn parse_lp(text: &str) -> Result<IpModel> {
    let mut section = Section::Start;
    let mut sense = ObjectiveSense::Minimize;
    let mut objective_line: Option<(usize, String)> = None;
    let mut rows: Vec<(usize, String)> = Vec::new();
    let mut vars: Vec<PendingVar> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();

    let perr = |line: usize, msg: String| Error::Parse {
        line: Some(line),
        field: None,
        message: msg,
    };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let header = match line.to_ascii_lowercase().as_str() {
            "maximize" | "maximise" | "max" => {
                sense = ObjectiveSense::Maximize;
                Some(Section::Objective)
            }
            "minimize" | "minimise" | "min" => {
                sense = ObjectiveSense::Minimize;
                Some(Section::Objective)
            }
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "general" | "generals" => Some(Section::General),
            "binary" | "binaries" => Some(Section::Binary),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(h) = header {
            section = h;
            continue;
        }
        match section {
            Section::Start | Section::End => {
                return Err(perr(lineno, format!("unexpected text `{line}`")))
            }
            Section::Objective => objective_line = Some((lineno, line.to_string())),
            Section::Constraints => rows.push((lineno, line.to_string())),
            Section::Bounds => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() != 5 || tokens[1] != "<=" || tokens[3] != "<=" {
                    return Err(perr(
                        lineno,
                        format!("expected `lo <= name <= hi`, got `{line}`"),
                    ));
                }
                let lower = parse_number(tokens[0])
                    .ok_or_else(|| perr(lineno, format!("bad number `{}`", tokens[0])))?;
                let upper = parse_number(tokens[4])
                    .ok_or_else(|| perr(lineno, format!("bad number `{}`", tokens[4])))?;
                let i = declare(&mut vars, &mut index, tokens[2]);
                vars[i].lower = lower;
                vars[i].upper = upper;
            }
            Section::General | Section::Binary => {
                for tok in line.split_whitespace() {
                    let i = declare(&mut vars, &mut index, tok);
                    if section == Section::General {
                        vars[i].general = true;
                    } else {
                        vars[i].binary = true;
                    }
                }
            }
        }
    }
    if section != Section::End {
        return Err(perr(text.lines().count(), "missing `End`".into()));
    }

    let mut model = IpModel::new();
    for v in &vars {
        let kind = if v.binary {
            VarKind::Binary
        } else if v.general {
            if v.lower.fract() != 0.0 || v.upper.fract() != 0.0 {
                return Err(Error::field(
                    &v.name,
                    "fractional bounds on an integer variable",
                ));
            }
            VarKind::Integer {
                lower: v.lower as i64,
                upper: v.upper as i64,
            }
        } else {
            VarKind::Continuous {
                lower: v.lower,
                upper: v.upper,
            }
        };
        model.add_variable(kind, v.name.clone())?;
    }
    let lookup = |lineno: usize, name: &str| -> Result<VarId> {
        index
            .get(name)
            .map(|&i| VarId(i))
            .ok_or_else(|| perr(lineno, format!("undeclared variable `{name}`")))
    };

    if let Some((lineno, line)) = objective_line {
        let body = line.split_once(':').map(|(_, b)| b).unwrap_or(&line);
        // the product block is a standalone `[` token; names may contain brackets
        let (lin, quad) = match body.find(" [ ").map(|p| (&body[..p], &body[p + 3..])) {
            Some((l, q)) => {
                let l = l.trim_end().strip_suffix('+').unwrap_or(l);
                (
                    l.to_string(),
                    Some(
                        q.trim_end()
                            .strip_suffix(" ]")
                            .ok_or_else(|| perr(lineno, "unclosed `[`".into()))?,
                    ),
                )
            }
            None => (body.to_string(), None),
        };
        let terms = parse_expr(&lin).map_err(|m| perr(lineno, m))?;
        let terms = terms
            .into_iter()
            .map(|(c, n)| Ok((c, lookup(lineno, &n)?)))
            .collect::<Result<Vec<_>>>()?;
        model.set_objective(sense, terms)?;
        if let Some(q) = quad {
            let tokens: Vec<&str> = q.split_whitespace().collect();
            if !tokens.len().is_multiple_of(4) {
                return Err(perr(
                    lineno,
                    "quadratic terms must read `coef a * b`".into(),
                ));
            }
            for t in tokens.chunks(4) {
                let c = parse_number(t[0])
                    .ok_or_else(|| perr(lineno, format!("bad number `{}`", t[0])))?;
                if t[2] != "*" {
                    return Err(perr(
                        lineno,
                        "quadratic terms must read `coef a * b`".into(),
                    ));
                }
                model.add_quadratic_term(c, lookup(lineno, t[1])?, lookup(lineno, t[3])?)?;
            }
        }
    } else {
        model.set_objective(sense, [])?;
    }

    for (lineno, line) in rows {
        let (name, body) = line
            .split_once(':')
            .ok_or_else(|| perr(lineno, "constraint needs a `name:` prefix".into()))?;
        let (op_pos, sense, width) = ["<=", ">=", "="]
            .iter()
            .find_map(|op| {
                body.find(op).map(|p| {
                    let s = match *op {
                        "<=" => Sense::Le,
                        ">=" => Sense::Ge,
                        _ => Sense::Eq,
                    };
                    (p, s, op.len())
                })
            })
            .ok_or_else(|| perr(lineno, "constraint without comparison".into()))?;
        let rhs_text = body[op_pos + width..].trim();
        let rhs = parse_number(rhs_text)
            .ok_or_else(|| perr(lineno, format!("bad right-hand side `{rhs_text}`")))?;
        let terms = parse_expr(&body[..op_pos]).map_err(|m| perr(lineno, m))?;
        let terms = terms
            .into_iter()
            .map(|(c, n)| Ok((c, lookup(lineno, &n)?)))
            .collect::<Result<Vec<_>>>()?;
        model.add_constraint(name.trim(), terms, sense, rhs)?;
    }
    Ok(model)
}

fn declare(vars: &mut Vec<PendingVar>, index: &mut HashMap<String, usize>, name: &str) -> usize {
    *index.entry(name.to_string()).or_insert_with(|| {
        vars.push(PendingVar {
            name: name.to_string(),
            lower: 0.0,
            upper: 1.0,
            general: false,
            binary: false,
        });
        vars.len() - 1
    })
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

fn parse_expr(text: &str) -> std::result::Result<Vec<(f64, String)>, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens == ["0"] || tokens.is_empty() {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in tokens {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -sign,
            _ => {
                let (neg, rest) = match tok.strip_prefix('-') {
                    Some(r) => (true, r),
                    None => (false, tok.strip_prefix('+').unwrap_or(tok)),
                };
                if neg {
                    sign = -sign;
                }
                let starts_numeric = rest
                    .chars()
                    .next()
                    .map(|c| c.is_ascii_digit() || c == '.')
                    .unwrap_or(false);
                if starts_numeric {
                    if coef.is_some() {
                        return Err(format!("two coefficients in a row near `{tok}`"));
                    }
                    coef = Some(
                        rest.parse()
                            .map_err(|_| format!("bad coefficient `{tok}`"))?,
                    );
                } else if rest.is_empty() {
                    return Err(format!("dangling sign `{tok}`"));
                } else {
                    terms.push((sign * coef.take().unwrap_or(1.0), rest.to_string()));
                    sign = 1.0;
                }
            }
        }
    }
    if coef.is_some() {
        return Err("coefficient without a variable".into());
    }
    Ok(terms)
}
