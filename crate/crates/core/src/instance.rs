//! Problem instances for the three problem families.

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Multi-robot path planning: route at least `k` of the robots to their goals
/// without vertex or edge collisions, minimizing the makespan.
#[derive(Debug, Clone, PartialEq)]
pub struct MppInstance {
    pub graph: Graph,
    pub starts: Vec<Vertex>,
    pub goals: Vec<Vertex>,
    pub k: usize,
    /// Interchangeable robot groups. Robots absent from every group form
    /// singleton groups. Within a group the goals are treated as a set.
    pub groups: Vec<Vec<usize>>,
}

impl MppInstance {
    pub fn new(
        graph: Graph,
        starts: Vec<Vertex>,
        goals: Vec<Vertex>,
        k: usize,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let inst = Self {
            graph,
            starts,
            goals,
            k,
            groups,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn robot_count(&self) -> usize {
        self.starts.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.starts.len();
        if self.goals.len() != n {
            return Err(Error::Invalid(format!(
                "{} starts but {} goals",
                n,
                self.goals.len()
            )));
        }
        check_vertices(&self.graph, &self.starts, "start")?;
        check_vertices(&self.graph, &self.goals, "goal")?;
        check_distinct(&self.starts, "starts")?;
        check_distinct(&self.goals, "goals")?;
        if self.k > n || (n > 0 && self.k == 0) {
            return Err(Error::Invalid(format!(
                "k = {} must lie in 1..={n}",
                self.k
            )));
        }
        let mut seen = vec![false; n];
        for group in &self.groups {
            if group.is_empty() {
                return Err(Error::Invalid("empty robot group".into()));
            }
            for &r in group {
                if r >= n {
                    return Err(Error::Invalid(format!(
                        "group references missing robot {r}"
                    )));
                }
                if std::mem::replace(&mut seen[r], true) {
                    return Err(Error::Invalid(format!("robot {r} belongs to two groups")));
                }
            }
        }
        Ok(())
    }

    /// All groups including singletons, ordered by their lowest robot index.
    pub fn units(&self) -> Vec<Vec<usize>> {
        let n = self.robot_count();
        let mut grouped = vec![false; n];
        let mut units: Vec<Vec<usize>> = Vec::new();
        for group in &self.groups {
            let mut g = group.clone();
            g.sort_unstable();
            for &r in &g {
                grouped[r] = true;
            }
            units.push(g);
        }
        units.extend((0..n).filter(|&r| !grouped[r]).map(|r| vec![r]));
        units.sort_by_key(|u| u[0]);
        units
    }

    /// Index into [`MppInstance::units`] for every robot.
    pub fn unit_of_robot(&self) -> Vec<usize> {
        let mut unit = vec![0; self.robot_count()];
        for (i, members) in self.units().iter().enumerate() {
            for &r in members {
                unit[r] = i;
            }
        }
        unit
    }
}

/// Multi-robot minimum constraint removal.
#[derive(Debug, Clone, PartialEq)]
pub struct MmcrInstance {
    pub graph: Graph,
    pub starts: Vec<Vertex>,
    pub goals: Vec<Vertex>,
    /// Each obstacle is a sorted, duplicate-free, nonempty vertex set.
    pub obstacles: Vec<Vec<Vertex>>,
}

impl MmcrInstance {
    pub fn new(
        graph: Graph,
        starts: Vec<Vertex>,
        goals: Vec<Vertex>,
        obstacles: Vec<Vec<Vertex>>,
    ) -> Result<Self> {
        let obstacles = obstacles
            .into_iter()
            .map(|mut o| {
                o.sort_unstable();
                o.dedup();
                o
            })
            .collect();
        let inst = Self {
            graph,
            starts,
            goals,
            obstacles,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn robot_count(&self) -> usize {
        self.starts.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.goals.len() != self.starts.len() {
            return Err(Error::Invalid(format!(
                "{} starts but {} goals",
                self.starts.len(),
                self.goals.len()
            )));
        }
        check_vertices(&self.graph, &self.starts, "start")?;
        check_vertices(&self.graph, &self.goals, "goal")?;
        for (i, o) in self.obstacles.iter().enumerate() {
            if o.is_empty() {
                return Err(Error::Invalid(format!("obstacle {i} is empty")));
            }
            check_vertices(&self.graph, o, "obstacle")?;
        }
        Ok(())
    }

    /// For every vertex, the sorted list of obstacles containing it.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut member = vec![Vec::new(); self.graph.vertex_count()];
        for (i, o) in self.obstacles.iter().enumerate() {
            for &v in o {
                member[v].push(i);
            }
        }
        member
    }
}

/// Reward model of a reward collection problem.
#[derive(Debug, Clone, PartialEq)]
pub enum RcpVariant {
    /// Quadratic correlated orienteering: per-vertex rewards, partial rewards
    /// from unvisited neighbors.
    Qcop { rewards: Vec<f64> },
    /// Optimal tourist problem: reward `rate * dwell` at each visited vertex.
    Otp { rates: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcpInstance {
    pub graph: Graph,
    /// Cost of every edge, indexed like [`Graph::edges`].
    pub edge_costs: Vec<f64>,
    pub budget: f64,
    pub starts: Vec<Vertex>,
    pub goals: Vec<Vertex>,
    pub variant: RcpVariant,
}

impl RcpInstance {
    pub fn new(
        graph: Graph,
        edge_costs: Vec<f64>,
        budget: f64,
        starts: Vec<Vertex>,
        goals: Vec<Vertex>,
        variant: RcpVariant,
    ) -> Result<Self> {
        let mut starts = starts;
        let mut goals = goals;
        starts.sort_unstable();
        starts.dedup();
        goals.sort_unstable();
        goals.dedup();
        let inst = Self {
            graph,
            edge_costs,
            budget,
            starts,
            goals,
            variant,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edge_costs.len() != self.graph.edge_count() {
            return Err(Error::Invalid(format!(
                "{} edge costs for {} edges",
                self.edge_costs.len(),
                self.graph.edge_count()
            )));
        }
        if self.edge_costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Invalid(
                "edge costs must be finite and non-negative".into(),
            ));
        }
        if !self.budget.is_finite() || self.budget < 0.0 {
            return Err(Error::Invalid(
                "budget must be finite and non-negative".into(),
            ));
        }
        if self.starts.is_empty() || self.goals.is_empty() {
            return Err(Error::Invalid(
                "start and goal sets must be nonempty".into(),
            ));
        }
        check_vertices(&self.graph, &self.starts, "start")?;
        check_vertices(&self.graph, &self.goals, "goal")?;
        let n = self.graph.vertex_count();
        let values = match &self.variant {
            RcpVariant::Qcop { rewards } => rewards,
            RcpVariant::Otp { rates } => {
                if self.starts != self.goals {
                    return Err(Error::Invalid(
                        "OTP requires the start set to equal the goal set".into(),
                    ));
                }
                rates
            }
        };
        if values.len() != n {
            return Err(Error::Invalid(format!(
                "{} vertex values for {} vertices",
                values.len(),
                n
            )));
        }
        if values.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Invalid(
                "rewards and rates must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn is_otp(&self) -> bool {
        matches!(self.variant, RcpVariant::Otp { .. })
    }

    pub fn cost(&self, a: Vertex, b: Vertex) -> f64 {
        if a == b {
            0.0
        } else {
            self.edge_costs[self.graph.edge_index(a, b).expect("edge exists")]
        }
    }

    pub fn problem_name(&self) -> &'static str {
        if self.is_otp() {
            "otp"
        } else {
            "qcop"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Mpp(MppInstance),
    Mmcr(MmcrInstance),
    Rcp(RcpInstance),
}

impl ProblemInstance {
    pub fn problem_name(&self) -> &'static str {
        match self {
            ProblemInstance::Mpp(_) => "mpp",
            ProblemInstance::Mmcr(_) => "mmcr",
            ProblemInstance::Rcp(r) => r.problem_name(),
        }
    }

    pub fn graph(&self) -> &Graph {
        match self {
            ProblemInstance::Mpp(i) => &i.graph,
            ProblemInstance::Mmcr(i) => &i.graph,
            ProblemInstance::Rcp(i) => &i.graph,
        }
    }
}

fn check_vertices(graph: &Graph, vertices: &[Vertex], what: &str) -> Result<()> {
    match vertices.iter().find(|&&v| v >= graph.vertex_count()) {
        Some(v) => Err(Error::Invalid(format!("{what} vertex {v} does not exist"))),
        None => Ok(()),
    }
}

fn check_distinct(vertices: &[Vertex], what: &str) -> Result<()> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    match sorted.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::Invalid(format!(
            "{what} are not pairwise distinct (vertex {})",
            w[0]
        ))),
        None => Ok(()),
    }
}
