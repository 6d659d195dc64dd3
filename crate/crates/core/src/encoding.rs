//! Path encodings: one binary per directed edge of the base graph, or one
//! binary per edge of a time-expanded graph with feedback edges closing each
//! path from its last layer back to its first.

use crate::error::{Error, Result};
use crate::graph::{Graph, Path, Vertex, UNREACHABLE};
use crate::model::{IpModel, Sense, VarId, VarKind};

// ---------------------------------------------------------------------------
// Base-graph encoding

#[derive(Debug, Clone, PartialEq)]
pub struct BaseEncoding {
    pub model: IpModel,
    pub unit: BaseUnit,
}

/// Variables of one path in a base-graph encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseUnit {
    pub label: usize,
    pub start: Vertex,
    pub goal: Vertex,
    /// Directed edges `(from, to, var)` sorted by `(from, to)`.
    pub edge_vars: Vec<(Vertex, Vertex, VarId)>,
    /// Order variable per vertex, present for non-terminals when subtour
    /// elimination is enabled.
    pub order_vars: Vec<Option<VarId>>,
}

impl BaseUnit {
    pub fn edge_var(&self, from: Vertex, to: Vertex) -> Option<VarId> {
        self.edge_vars
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&(from, to)))
            .ok()
            .map(|i| self.edge_vars[i].2)
    }

    /// Follows positive edge variables from the start until the goal.
    /// Cycles disjoint from the path are ignored.
    pub fn extract_path(&self, values: &[f64]) -> Result<Path> {
        let mut path = vec![self.start];
        let mut cur = self.start;
        let limit = self.order_vars.len() + 1;
        while cur != self.goal {
            let lo = self.edge_vars.partition_point(|e| e.0 < cur);
            let next: Vec<Vertex> = self.edge_vars[lo..]
                .iter()
                .take_while(|e| e.0 == cur)
                .filter(|e| values[e.2 .0] > 0.5)
                .map(|e| e.1)
                .collect();
            if next.len() != 1 {
                return Err(Error::Model(format!(
                    "vertex {cur} has {} outgoing path edges",
                    next.len()
                )));
            }
            cur = next[0];
            path.push(cur);
            if path.len() > limit {
                return Err(Error::Model("path edges form a cycle".into()));
            }
        }
        let path = Path::new(path);
        if !path.is_simple() {
            return Err(Error::Model("path edges revisit a vertex".into()));
        }
        Ok(path)
    }

    /// Sets the variables of this unit for a non-cyclic path.
    pub fn write_assignment(&self, path: &Path, values: &mut [f64]) -> Result<()> {
        if path.first() != Some(self.start) || path.last() != Some(self.goal) {
            return Err(Error::Invalid(
                "path does not connect start and goal".into(),
            ));
        }
        if !path.is_simple() {
            return Err(Error::Invalid("path revisits a vertex".into()));
        }
        for &(_, _, v) in &self.edge_vars {
            values[v.0] = 0.0;
        }
        for w in path.vertices.windows(2) {
            let v = self
                .edge_var(w[0], w[1])
                .ok_or_else(|| Error::Invalid(format!("({}, {}) is not an edge", w[0], w[1])))?;
            values[v.0] = 1.0;
        }
        for u in self.order_vars.iter().flatten() {
            values[u.0] = 3.0;
        }
        // interior vertices get consecutive orders 3, 4, ...
        for (i, &v) in path.vertices.iter().enumerate().skip(1) {
            if let Some(u) = self.order_vars[v] {
                values[u.0] = 2.0 + i as f64;
            }
        }
        Ok(())
    }
}

/// Adds the variables and rows of one start-to-goal path on `graph`:
/// one departure from the start and one arrival at the goal, nothing into the
/// start or out of the goal, and for every other vertex out-degree equal to
/// in-degree, at most one. With `subtour_elimination`, order variables
/// `3 <= u_i <= |V|` and `u_i - u_j + (|V|-2) x_ij <= |V|-3` for every directed
/// edge between non-terminals (skipped when `|V| <= 3`).
pub fn add_base_unit(
    model: &mut IpModel,
    graph: &Graph,
    label: usize,
    start: Vertex,
    goal: Vertex,
    subtour_elimination: bool,
) -> Result<BaseUnit> {
    if start == goal {
        return Err(Error::Model(
            "start equals goal; split the vertex first".into(),
        ));
    }
    let n = graph.vertex_count();
    let mut edge_vars = Vec::with_capacity(2 * graph.edge_count());
    for a in 0..n {
        for &b in graph.neighbors(a) {
            edge_vars.push((a, b, model.add_binary(format!("x[{label}][{a}][{b}]"))));
        }
    }
    let unit_without_order = BaseUnit {
        label,
        start,
        goal,
        edge_vars,
        order_vars: vec![None; n],
    };
    let out = |v: Vertex| graph.neighbors(v).iter().map(move |&w| (v, w));
    let inc = |v: Vertex| graph.neighbors(v).iter().map(move |&w| (w, v));
    let terms =
        |edges: &mut dyn Iterator<Item = (Vertex, Vertex)>, coef: f64| -> Vec<(f64, VarId)> {
            edges
                .map(|(a, b)| {
                    (
                        coef,
                        unit_without_order.edge_var(a, b).expect("edge variable"),
                    )
                })
                .collect()
        };
    model.add_constraint(
        format!("start[{label}]"),
        terms(&mut out(start), 1.0),
        Sense::Eq,
        1.0,
    )?;
    model.add_constraint(
        format!("goal[{label}]"),
        terms(&mut inc(goal), 1.0),
        Sense::Eq,
        1.0,
    )?;
    model.add_constraint(
        format!("start_in[{label}]"),
        terms(&mut inc(start), 1.0),
        Sense::Eq,
        0.0,
    )?;
    model.add_constraint(
        format!("goal_out[{label}]"),
        terms(&mut out(goal), 1.0),
        Sense::Eq,
        0.0,
    )?;
    for v in (0..n).filter(|&v| v != start && v != goal) {
        let mut row = terms(&mut out(v), 1.0);
        row.extend(terms(&mut inc(v), -1.0));
        model.add_constraint(format!("balance[{label}][{v}]"), row, Sense::Eq, 0.0)?;
        model.add_constraint(
            format!("degree[{label}][{v}]"),
            terms(&mut inc(v), 1.0),
            Sense::Le,
            1.0,
        )?;
    }
    let mut unit = unit_without_order;
    if subtour_elimination && n > 3 {
        let big = (n - 2) as f64;
        for v in (0..n).filter(|&v| v != start && v != goal) {
            unit.order_vars[v] = Some(model.add_variable(
                VarKind::Integer {
                    lower: 3,
                    upper: n as i64,
                },
                format!("u[{v}]"),
            )?);
        }
        for &(a, b, x) in &unit.edge_vars {
            if let (Some(ua), Some(ub)) = (unit.order_vars[a], unit.order_vars[b]) {
                model.add_constraint(
                    format!("subtour[{label}][{a}][{b}]"),
                    [(1.0, ua), (-1.0, ub), (big, x)],
                    Sense::Le,
                    big - 1.0,
                )?;
            }
        }
    }
    Ok(unit)
}

pub fn encode_base(
    graph: &Graph,
    start: Vertex,
    goal: Vertex,
    subtour_elimination: bool,
) -> Result<BaseEncoding> {
    let mut model = IpModel::new();
    let unit = add_base_unit(&mut model, graph, 0, start, goal, subtour_elimination)?;
    Ok(BaseEncoding { model, unit })
}

impl BaseEncoding {
    pub fn extract_path(&self, values: &[f64]) -> Result<Path> {
        self.unit.extract_path(values)
    }

    pub fn encode_assignment(&self, path: &Path) -> Result<Vec<f64>> {
        let mut values = vec![0.0; self.model.variable_count()];
        self.unit.write_assignment(path, &mut values)?;
        Ok(values)
    }
}

/// A graph in which one vertex `x` is replaced by `v_out` (reusing the id of
/// `x`) and a new vertex `v_in`, both adjacent to every neighbor of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitGraph {
    pub graph: Graph,
    pub original: Vertex,
    pub v_out: Vertex,
    pub v_in: Vertex,
}

pub fn split_start_goal(graph: &Graph, x: Vertex) -> Result<SplitGraph> {
    let n = graph.vertex_count();
    if x >= n {
        return Err(Error::Invalid(format!("vertex {x} does not exist")));
    }
    if graph.degree(x) == 0 {
        return Err(Error::Invalid(format!(
            "vertex {x} has no neighbors to split over"
        )));
    }
    let mut edges = graph.edges().to_vec();
    edges.extend(graph.neighbors(x).iter().map(|&w| (w, n)));
    Ok(SplitGraph {
        graph: Graph::new(n + 1, &edges)?,
        original: x,
        v_out: x,
        v_in: n,
    })
}

impl SplitGraph {
    /// Maps a `v_out -> v_in` path back to a closed walk through `x`.
    pub fn lift(&self, path: &Path) -> Result<Path> {
        let v = &path.vertices;
        if v.len() < 3 || v[0] != self.v_out || v[v.len() - 1] != self.v_in {
            return Err(Error::Invalid(
                "path must leave v_out, visit another vertex and end at v_in".into(),
            ));
        }
        Ok(Path::new(
            v.iter()
                .map(|&u| if u == self.v_in { self.original } else { u })
                .collect(),
        ))
    }
}

// ---------------------------------------------------------------------------
// Time-expanded encoding

/// Which copies `(t, v)` survive before any heuristic is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reachability {
    /// Every vertex at every layer.
    None,
    /// `dist(starts, v) <= t`.
    Forward,
    /// `dist(starts, v) <= t` and `dist(v, ends) <= T - t`.
    Full,
}

/// Kept copies per layer, `kept[t][v]` for `t` in `0..=T`.
pub fn reachable_copies(
    graph: &Graph,
    starts: &[Vertex],
    ends: &[Vertex],
    horizon: usize,
    mode: Reachability,
) -> Vec<Vec<bool>> {
    let n = graph.vertex_count();
    let from_start = graph.distances_from(starts);
    let to_end = if mode == Reachability::Full {
        graph.distances_from(ends)
    } else {
        vec![0; n]
    };
    (0..=horizon)
        .map(|t| {
            (0..n)
                .map(|v| match mode {
                    Reachability::None => true,
                    _ => {
                        from_start[v] != UNREACHABLE
                            && from_start[v] <= t
                            && to_end[v] != UNREACHABLE
                            && to_end[v] <= horizon - t
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub from: Vertex,
    pub to: Vertex,
    pub var: VarId,
}

/// Feedback edge from the copy of `end` at layer T to the copy of `start` at
/// layer 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feedback {
    pub end: Vertex,
    pub start: Vertex,
    pub var: VarId,
}

/// One flow in a time-expanded encoding: a single robot, or a group of
/// interchangeable robots sharing one variable copy.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeUnit {
    pub label: usize,
    /// Robots carried by this flow, in ascending order. Their starts are the
    /// flow's sources.
    pub robots: Vec<usize>,
    pub starts: Vec<Vertex>,
    pub kept: Vec<Vec<bool>>,
    /// `moves[t]` for `t` in `1..=T`, sorted by `(from, to)`; `moves[0]` is
    /// empty.
    pub moves: Vec<Vec<Move>>,
    pub feedback: Vec<Feedback>,
}

impl TimeUnit {
    pub fn horizon(&self) -> usize {
        self.kept.len() - 1
    }

    pub fn move_var(&self, t: usize, from: Vertex, to: Vertex) -> Option<VarId> {
        let layer = self.moves.get(t)?;
        layer
            .binary_search_by(|m| (m.from, m.to).cmp(&(from, to)))
            .ok()
            .map(|i| layer[i].var)
    }

    pub fn feedback_var(&self, end: Vertex, start: Vertex) -> Option<VarId> {
        self.feedback
            .iter()
            .find(|f| f.end == end && f.start == start)
            .map(|f| f.var)
    }

    pub fn variable_count(&self) -> usize {
        self.feedback.len() + self.moves.iter().map(Vec::len).sum::<usize>()
    }

    /// One path per carried robot, matched to robots by start vertex.
    pub fn extract_paths(&self, values: &[f64]) -> Result<Vec<Path>> {
        let on = |v: VarId| values[v.0] > 0.5;
        let horizon = self.horizon();
        let mut used: Vec<Vec<bool>> = self.moves.iter().map(|l| vec![false; l.len()]).collect();
        let mut paths = Vec::with_capacity(self.starts.len());
        for &s in &self.starts {
            let inflow = self
                .feedback
                .iter()
                .filter(|f| f.start == s && on(f.var))
                .count();
            if inflow != 1 {
                return Err(Error::Model(format!(
                    "start {s} of flow {} has inflow {inflow}",
                    self.label
                )));
            }
            let mut cur = s;
            let mut vertices = vec![s];
            for t in 1..=horizon {
                let layer = &self.moves[t];
                let lo = layer.partition_point(|m| m.from < cur);
                let pick = (lo..layer.len())
                    .take_while(|&i| layer[i].from == cur)
                    .find(|&i| !used[t][i] && on(layer[i].var))
                    .ok_or_else(|| {
                        Error::Model(format!(
                            "flow {} breaks at layer {t} vertex {cur}",
                            self.label
                        ))
                    })?;
                used[t][pick] = true;
                cur = layer[pick].to;
                vertices.push(cur);
            }
            if !self.feedback.iter().any(|f| f.end == cur && on(f.var)) {
                return Err(Error::Model(format!(
                    "flow {} ends at {cur} without a feedback edge",
                    self.label
                )));
            }
            paths.push(Path::new(vertices));
        }
        Ok(paths)
    }

    /// Sets this flow's variables for one path per carried robot (in the
    /// order of `starts`); each path closes through the feedback edge from its
    /// end to its own start.
    pub fn write_assignment(&self, paths: &[Path], values: &mut [f64]) -> Result<()> {
        if paths.len() != self.starts.len() {
            return Err(Error::Invalid(format!(
                "{} paths for a flow of {}",
                paths.len(),
                self.starts.len()
            )));
        }
        for f in &self.feedback {
            values[f.var.0] = 0.0;
        }
        for layer in &self.moves {
            for m in layer {
                values[m.var.0] = 0.0;
            }
        }
        let horizon = self.horizon();
        for (path, &s) in paths.iter().zip(&self.starts) {
            let v = &path.vertices;
            if v.len() != horizon + 1 {
                return Err(Error::Invalid(format!(
                    "path has {} vertices, horizon needs {}",
                    v.len(),
                    horizon + 1
                )));
            }
            if v[0] != s {
                return Err(Error::Invalid("path does not begin at its start".into()));
            }
            for t in 1..=horizon {
                let var = self.move_var(t, v[t - 1], v[t]).ok_or_else(|| {
                    Error::Invalid(format!(
                        "move {} -> {} at step {t} is not in the encoding",
                        v[t - 1],
                        v[t]
                    ))
                })?;
                values[var.0] = 1.0;
            }
            let fb = self.feedback_var(v[horizon], s).ok_or_else(|| {
                Error::Invalid(format!("no feedback edge from {} to {s}", v[horizon]))
            })?;
            values[fb.0] = 1.0;
        }
        Ok(())
    }
}

/// Adds moves for every kept pair `(t-1, a) -> (t, b)` with `b` in `N(a) ∪ {a}`.
pub(crate) fn add_moves(
    model: &mut IpModel,
    graph: &Graph,
    label: usize,
    kept: &[Vec<bool>],
) -> Vec<Vec<Move>> {
    let horizon = kept.len() - 1;
    let mut moves = vec![Vec::new()];
    for t in 1..=horizon {
        let mut layer = Vec::new();
        for a in (0..graph.vertex_count()).filter(|&a| kept[t - 1][a]) {
            let nb = graph.neighbors(a);
            let split = nb.partition_point(|&w| w < a);
            let targets = nb[..split]
                .iter()
                .copied()
                .chain(std::iter::once(a))
                .chain(nb[split..].iter().copied());
            for b in targets.filter(|&b| kept[t][b]) {
                layer.push(Move {
                    from: a,
                    to: b,
                    var: model.add_binary(format!("x[{label}][{t}][{a}][{b}]")),
                });
            }
        }
        moves.push(layer);
    }
    moves
}

/// Flow conservation at every kept copy: moves out (or terminal edges out at
/// layer T) equal moves in (or terminal edges in at layer 0).
pub(crate) fn add_flow_rows(
    model: &mut IpModel,
    label: usize,
    kept: &[Vec<bool>],
    moves: &[Vec<Move>],
    terminal_in: &[(Vertex, VarId)],
    terminal_out: &[(Vertex, VarId)],
) -> Result<()> {
    let horizon = kept.len() - 1;
    let n = kept[0].len();
    let mut incoming: Vec<Vec<(f64, VarId)>> = vec![Vec::new(); n];
    for &(v, var) in terminal_in {
        incoming[v].push((-1.0, var));
    }
    for t in 0..=horizon {
        let mut outgoing: Vec<Vec<(f64, VarId)>> = vec![Vec::new(); n];
        if t < horizon {
            for m in &moves[t + 1] {
                outgoing[m.from].push((1.0, m.var));
            }
        } else {
            for &(v, var) in terminal_out {
                outgoing[v].push((1.0, var));
            }
        }
        for v in (0..n).filter(|&v| kept[t][v]) {
            let mut row = std::mem::take(&mut outgoing[v]);
            row.extend(incoming[v].iter().copied());
            if !row.is_empty() {
                model.add_constraint(format!("flow[{label}][{t}][{v}]"), row, Sense::Eq, 0.0)?;
            }
        }
        if t < horizon {
            incoming = vec![Vec::new(); n];
            for m in &moves[t + 1] {
                incoming[m.to].push((-1.0, m.var));
            }
        }
    }
    Ok(())
}

fn check_layers(
    kept: &[Vec<bool>],
    starts: &[Vertex],
    ends: &[Vertex],
    label: usize,
) -> Result<()> {
    if let Some(t) = kept.iter().position(|layer| !layer.contains(&true)) {
        return Err(Error::EmptyLayer(format!(
            "flow {label} keeps no vertex at layer {t}"
        )));
    }
    if !starts.iter().any(|&s| kept[0][s]) {
        return Err(Error::EmptyLayer(format!(
            "flow {label} keeps no start copy"
        )));
    }
    if !ends.iter().any(|&g| kept[kept.len() - 1][g]) {
        return Err(Error::EmptyLayer(format!("flow {label} keeps no end copy")));
    }
    Ok(())
}

/// Specification of one flow for [`add_time_unit`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSpec {
    pub label: usize,
    pub robots: Vec<usize>,
    pub starts: Vec<Vertex>,
    /// Candidate end vertices; a feedback edge is created from every kept end
    /// copy to every start.
    pub ends: Vec<Vertex>,
    /// Total feedback, normally the number of carried robots.
    pub flow: usize,
}

/// Adds feedback variables, moves, flow conservation and the row fixing the
/// total feedback to the number of carried robots.
pub fn add_time_unit(
    model: &mut IpModel,
    graph: &Graph,
    spec: &UnitSpec,
    kept: Vec<Vec<bool>>,
) -> Result<TimeUnit> {
    check_layers(&kept, &spec.starts, &spec.ends, spec.label)?;
    let horizon = kept.len() - 1;
    let label = spec.label;
    let mut ends: Vec<Vertex> = spec
        .ends
        .iter()
        .copied()
        .filter(|&g| kept[horizon][g])
        .collect();
    ends.sort_unstable();
    ends.dedup();
    let mut starts_sorted: Vec<Vertex> = spec
        .starts
        .iter()
        .copied()
        .filter(|&s| kept[0][s])
        .collect();
    starts_sorted.sort_unstable();
    let mut feedback = Vec::new();
    for &g in &ends {
        for &s in &starts_sorted {
            feedback.push(Feedback {
                end: g,
                start: s,
                var: model.add_binary(format!("x[{label}][0][{g}][{s}]")),
            });
        }
    }
    let moves = add_moves(model, graph, label, &kept);
    let t_in: Vec<(Vertex, VarId)> = feedback.iter().map(|f| (f.start, f.var)).collect();
    let t_out: Vec<(Vertex, VarId)> = feedback.iter().map(|f| (f.end, f.var)).collect();
    add_flow_rows(model, label, &kept, &moves, &t_in, &t_out)?;
    model.add_constraint(
        format!("feedback[{label}]"),
        feedback.iter().map(|f| (1.0, f.var)),
        Sense::Eq,
        spec.flow as f64,
    )?;
    Ok(TimeUnit {
        label,
        robots: spec.robots.clone(),
        starts: spec.starts.clone(),
        kept,
        moves,
        feedback,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeExpandedEncoding {
    pub model: IpModel,
    pub horizon: usize,
    pub units: Vec<TimeUnit>,
}

/// Role of a model variable in a time-expanded encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Move {
        unit: usize,
        t: usize,
        from: Vertex,
        to: Vertex,
    },
    Feedback {
        unit: usize,
        end: Vertex,
        start: Vertex,
    },
}

impl TimeExpandedEncoding {
    pub fn var_roles(&self) -> Vec<Option<VarRole>> {
        let mut roles = vec![None; self.model.variable_count()];
        for (u, unit) in self.units.iter().enumerate() {
            for f in &unit.feedback {
                roles[f.var.0] = Some(VarRole::Feedback {
                    unit: u,
                    end: f.end,
                    start: f.start,
                });
            }
            for (t, layer) in unit.moves.iter().enumerate() {
                for m in layer {
                    roles[m.var.0] = Some(VarRole::Move {
                        unit: u,
                        t,
                        from: m.from,
                        to: m.to,
                    });
                }
            }
        }
        roles
    }

    /// Paths of every robot, ordered by robot index.
    pub fn extract_paths(&self, values: &[f64]) -> Result<Vec<Path>> {
        let n: usize = self.units.iter().map(|u| u.robots.len()).sum();
        let mut out = vec![Path::default(); n];
        for unit in &self.units {
            for (r, p) in unit.robots.iter().zip(unit.extract_paths(values)?) {
                out[*r] = p;
            }
        }
        Ok(out)
    }

    /// Path of the single flow of a one-robot encoding.
    pub fn extract_path(&self, values: &[f64]) -> Result<Path> {
        match self.units.as_slice() {
            [unit] if unit.robots.len() == 1 => unit.extract_single(values),
            _ => Err(Error::Model("encoding carries more than one path".into())),
        }
    }

    /// Assignment for one path per robot (indexed like the robots).
    pub fn encode_assignment(&self, paths: &[Path]) -> Result<Vec<f64>> {
        let mut values = vec![0.0; self.model.variable_count()];
        for unit in &self.units {
            let own: Vec<Path> = unit
                .robots
                .iter()
                .map(|&r| paths.get(r).cloned().unwrap_or_default())
                .collect();
            unit.write_assignment(&own, &mut values)?;
        }
        Ok(values)
    }
}

/// Single-path time-expanded encoding from any vertex of `starts` to any
/// vertex of `goals` in exactly `horizon` steps (waiting allowed), with one
/// feedback edge per (goal, start) pair.
pub fn encode_time_expanded(
    graph: &Graph,
    starts: &[Vertex],
    goals: &[Vertex],
    horizon: usize,
    reachability: bool,
) -> Result<TimeExpandedEncoding> {
    let mode = if reachability {
        Reachability::Full
    } else {
        Reachability::None
    };
    let kept = reachable_copies(graph, starts, goals, horizon, mode);
    let mut model = IpModel::new();
    let spec = UnitSpec {
        label: 0,
        robots: vec![0],
        starts: starts.to_vec(),
        ends: goals.to_vec(),
        flow: 1,
    };
    let unit = add_time_unit(&mut model, graph, &spec, kept)?;
    Ok(TimeExpandedEncoding {
        model,
        horizon,
        units: vec![unit],
    })
}

impl TimeUnit {
    /// Path of a single-path flow whose start is chosen among several.
    pub fn extract_single(&self, values: &[f64]) -> Result<Path> {
        let s = self
            .feedback
            .iter()
            .find(|f| values[f.var.0] > 0.5)
            .map(|f| f.start)
            .ok_or_else(|| Error::Model("no feedback edge is used".into()))?;
        let single = TimeUnit {
            starts: vec![s],
            robots: vec![self.robots[0]],
            ..self.clone()
        };
        Ok(single.extract_paths(values)?.remove(0))
    }
}
