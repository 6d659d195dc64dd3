//! Seeded random grid instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{grid_graph, Graph, Vertex};
use crate::instance::{MmcrInstance, MppInstance, ProblemInstance, RcpInstance, RcpVariant};

/// Attempts at drawing a removal pattern that keeps the grid connected.
pub const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Grid with `⌊removal · rows · cols⌋` cells removed; robots on distinct
    /// free cells. `k` defaults to every robot.
    Mpp {
        rows: usize,
        cols: usize,
        removal: f64,
        n: usize,
        #[serde(default)]
        k: Option<usize>,
    },
    /// Full grid with random axis-aligned rectangles of side at most
    /// `max_side` as obstacles.
    Mmcr {
        rows: usize,
        cols: usize,
        n: usize,
        obstacles: usize,
        max_side: usize,
    },
    /// Full grid with unit costs and rewards drawn from (0, 1]; every vertex
    /// is a goal.
    Qcop {
        rows: usize,
        cols: usize,
        budget: f64,
        starts: usize,
    },
    /// Full grid with unit costs and rates drawn from (0, 1]; closed walks.
    Otp {
        rows: usize,
        cols: usize,
        budget: f64,
        starts: usize,
    },
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Invalid("grid dimensions must be positive".into()));
    }
    Ok(())
}

fn full_grid(rows: usize, cols: usize) -> Result<Graph> {
    check_dims(rows, cols)?;
    Ok(grid_graph(rows, cols, &vec![false; rows * cols])?.0)
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Result<Vec<Vertex>> {
    if count > n {
        return Err(Error::Invalid(format!(
            "{count} placements need more than {n} free cells"
        )));
    }
    Ok(sample(rng, n, count).into_vec())
}

/// Value in (0, 1].
fn positive_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn mpp_grid(rng: &mut ChaCha8Rng, rows: usize, cols: usize, removal: f64) -> Result<Graph> {
    check_dims(rows, cols)?;
    if !(0.0..1.0).contains(&removal) {
        return Err(Error::Invalid(format!(
            "removal fraction {removal} must lie in [0, 1)"
        )));
    }
    let cells = rows * cols;
    let remove = (removal * cells as f64).floor() as usize;
    if remove >= cells {
        return Err(Error::Invalid("removal leaves no free cell".into()));
    }
    for _ in 0..MAX_RESAMPLES {
        let mut blocked = vec![false; cells];
        for c in sample(rng, cells, remove) {
            blocked[c] = true;
        }
        let (g, _) = grid_graph(rows, cols, &blocked)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Invalid(format!(
        "no connected removal pattern found in {MAX_RESAMPLES} draws"
    )))
}

pub fn generate_instance(spec: &GeneratorSpec, seed: u64) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match *spec {
        GeneratorSpec::Mpp {
            rows,
            cols,
            removal,
            n,
            k,
        } => {
            let graph = mpp_grid(&mut rng, rows, cols, removal)?;
            let v = graph.vertex_count();
            let starts = distinct(&mut rng, v, n)?;
            let goals = distinct(&mut rng, v, n)?;
            ProblemInstance::Mpp(MppInstance::new(
                graph,
                starts,
                goals,
                k.unwrap_or(n),
                Vec::new(),
            )?)
        }
        GeneratorSpec::Mmcr {
            rows,
            cols,
            n,
            obstacles,
            max_side,
        } => {
            let graph = full_grid(rows, cols)?;
            if max_side == 0 {
                return Err(Error::Invalid("obstacle side must be positive".into()));
            }
            let mut obs = Vec::with_capacity(obstacles);
            for _ in 0..obstacles {
                let h = rng.gen_range(1..=max_side.min(rows));
                let w = rng.gen_range(1..=max_side.min(cols));
                let r0 = rng.gen_range(0..=rows - h);
                let c0 = rng.gen_range(0..=cols - w);
                obs.push(
                    (r0..r0 + h)
                        .flat_map(|r| (c0..c0 + w).map(move |c| r * cols + c))
                        .collect(),
                );
            }
            let v = graph.vertex_count();
            let starts = distinct(&mut rng, v, n)?;
            let goals = distinct(&mut rng, v, n)?;
            ProblemInstance::Mmcr(MmcrInstance::new(graph, starts, goals, obs)?)
        }
        GeneratorSpec::Qcop {
            rows,
            cols,
            budget,
            starts,
        }
        | GeneratorSpec::Otp {
            rows,
            cols,
            budget,
            starts,
        } => {
            let graph = full_grid(rows, cols)?;
            let v = graph.vertex_count();
            let values: Vec<f64> = (0..v).map(|_| positive_unit(&mut rng)).collect();
            let s = distinct(&mut rng, v, starts)?;
            let costs = vec![1.0; graph.edge_count()];
            let inst = if matches!(spec, GeneratorSpec::Qcop { .. }) {
                RcpInstance::new(
                    graph,
                    costs,
                    budget,
                    s,
                    (0..v).collect(),
                    RcpVariant::Qcop { rewards: values },
                )?
            } else {
                RcpInstance::new(
                    graph,
                    costs,
                    budget,
                    s.clone(),
                    s,
                    RcpVariant::Otp { rates: values },
                )?
            };
            ProblemInstance::Rcp(inst)
        }
    })
}
