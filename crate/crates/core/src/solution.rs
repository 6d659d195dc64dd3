//! Solutions shared by the three problem families.

use crate::graph::Path;
use crate::solver::{SolveOutcome, SolveStatus};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolutionStats {
    pub variable_count: usize,
    pub constraint_count: usize,
    pub branch_nodes: usize,
    /// Seconds spent building and solving.
    pub wall_time: f64,
}

impl SolutionStats {
    pub(crate) fn absorb(&mut self, outcome: &SolveOutcome) {
        self.branch_nodes += outcome.stats.nodes;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// One path per robot (MPP, MMCR) or the single walk (reward problems).
    pub paths: Vec<Path>,
    pub makespan: Option<usize>,
    /// Indices into the instance's obstacle list.
    pub removed_obstacles: Vec<usize>,
    pub reward: Option<f64>,
    /// Dwell time per vertex (OTP), empty otherwise.
    pub dwell_times: Vec<f64>,
    pub objective: Option<f64>,
    pub stats: SolutionStats,
}

impl Solution {
    pub fn empty(status: SolveStatus) -> Self {
        Self {
            status,
            paths: Vec::new(),
            makespan: None,
            removed_obstacles: Vec::new(),
            reward: None,
            dwell_times: Vec::new(),
            objective: None,
            stats: SolutionStats::default(),
        }
    }

    pub fn with_paths(status: SolveStatus, paths: Vec<Path>) -> Self {
        Self {
            paths,
            ..Self::empty(status)
        }
    }
}
