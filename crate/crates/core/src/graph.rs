//! Undirected graphs and the breadth-first-search utilities every problem
//! layer relies on (reachability, reference paths, residual connectivity).

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Marks a vertex that cannot be reached in a distance table.
pub const UNREACHABLE: usize = usize::MAX;

/// A connected, simple, undirected graph over vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph and checks that it is simple and connected.
    pub fn new(vertex_count: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let graph = Self::build(vertex_count, edges)?;
        if !graph.is_connected() {
            return Err(Error::Invalid("graph disconnected".into()));
        }
        Ok(graph)
    }

    /// Same as [`Graph::new`] without the connectivity requirement. Used for
    /// intermediate structures such as residual graphs.
    pub fn new_unchecked_connectivity(
        vertex_count: usize,
        edges: &[(Vertex, Vertex)],
    ) -> Result<Self> {
        Self::build(vertex_count, edges)
    }

    fn build(vertex_count: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Invalid("graph has no vertices".into()));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::Invalid(format!(
                    "edge ({a}, {b}) references a missing vertex"
                )));
            }
            if a == b {
                return Err(Error::Invalid(format!("self-loop at vertex {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &normalized {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            vertex_count,
            edges: normalized,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(low, high)` pairs in sorted order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.vertex_count && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Position of the undirected edge `{a, b}` in [`Graph::edges`].
    pub fn edge_index(&self, a: Vertex, b: Vertex) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(&[0]).iter().all(|&d| d != UNREACHABLE)
    }

    /// Hop distances from the nearest vertex of `sources`.
    pub fn distances_from(&self, sources: &[Vertex]) -> Vec<usize> {
        self.distances_filtered(sources, |_| true)
    }

    /// Hop distances restricted to vertices accepted by `allowed`.
    /// Sources that are not allowed are ignored.
    pub fn distances_filtered(
        &self,
        sources: &[Vertex],
        allowed: impl Fn(Vertex) -> bool,
    ) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.vertex_count];
        let mut queue = VecDeque::new();
        for &s in sources {
            if allowed(s) && dist[s] == UNREACHABLE {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w] == UNREACHABLE && allowed(w) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// A shortest path from `from` to `to` over allowed vertices. Ties are
    /// broken towards lower vertex ids, so the result is deterministic.
    pub fn shortest_path_filtered(
        &self,
        from: Vertex,
        to: Vertex,
        allowed: impl Fn(Vertex) -> bool,
    ) -> Option<Vec<Vertex>> {
        if !allowed(from) || !allowed(to) {
            return None;
        }
        let dist = self.distances_filtered(&[to], &allowed);
        if dist[from] == UNREACHABLE {
            return None;
        }
        let mut path = vec![from];
        let mut current = from;
        while current != to {
            current = *self.adjacency[current]
                .iter()
                .find(|&&w| dist[w] != UNREACHABLE && dist[w] + 1 == dist[current])
                .expect("distance table is consistent");
            path.push(current);
        }
        Some(path)
    }

    pub fn shortest_path(&self, from: Vertex, to: Vertex) -> Option<Vec<Vertex>> {
        self.shortest_path_filtered(from, to, |_| true)
    }

    pub fn diameter(&self) -> usize {
        (0..self.vertex_count)
            .map(|v| {
                self.distances_from(&[v])
                    .into_iter()
                    .filter(|&d| d != UNREACHABLE)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// True if consecutive vertices are equal or adjacent.
    pub fn is_walk(&self, vertices: &[Vertex]) -> bool {
        vertices.iter().all(|&v| v < self.vertex_count)
            && vertices
                .windows(2)
                .all(|w| w[0] == w[1] || self.has_edge(w[0], w[1]))
    }
}

/// A sequence of vertices `p^0 ... p^T` where consecutive entries are equal or
/// adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Path {
    pub vertices: Vec<Vertex>,
}

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        Self { vertices }
    }

    /// Number of time steps covered, i.e. `T` for `p^0 ... p^T`.
    pub fn steps(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn first(&self) -> Option<Vertex> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<Vertex> {
        self.vertices.last().copied()
    }

    pub fn is_valid_in(&self, graph: &Graph) -> bool {
        self.vertices.is_empty() || graph.is_walk(&self.vertices)
    }

    /// True if no vertex appears twice.
    pub fn is_simple(&self) -> bool {
        let mut seen = self.vertices.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Pads the path with waits at its last vertex up to `steps` steps.
    pub fn padded(&self, steps: usize) -> Path {
        let mut vertices = self.vertices.clone();
        if let Some(&last) = vertices.last() {
            while vertices.len() < steps + 1 {
                vertices.push(last);
            }
        }
        Path { vertices }
    }
}

/// 4-connected grid over the cells not marked as blocked, with vertices
/// numbered in row-major order of the free cells. Returns the graph (which
/// may be disconnected) and the cell index of every vertex.
pub fn grid_graph(rows: usize, cols: usize, blocked: &[bool]) -> Result<(Graph, Vec<usize>)> {
    assert_eq!(blocked.len(), rows * cols);
    let mut id = vec![UNREACHABLE; rows * cols];
    let mut cells = Vec::new();
    for cell in 0..rows * cols {
        if !blocked[cell] {
            id[cell] = cells.len();
            cells.push(cell);
        }
    }
    let mut edges = Vec::new();
    for &cell in &cells {
        let (r, c) = (cell / cols, cell % cols);
        if c + 1 < cols && !blocked[cell + 1] {
            edges.push((id[cell], id[cell + 1]));
        }
        if r + 1 < rows && !blocked[cell + cols] {
            edges.push((id[cell], id[cell + cols]));
        }
    }
    let graph = Graph::new_unchecked_connectivity(cells.len(), &edges)?;
    Ok((graph, cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_disconnected() {
        let err = Graph::new(2, &[]).unwrap_err();
        assert_eq!(err, Error::Invalid("graph disconnected".into()));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Graph::new(2, &[(0, 0), (0, 1)]).is_err());
        assert!(Graph::new(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = Graph::new(4, &[(2, 1), (0, 1), (1, 3)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(g.neighbors(1), &[0, 2, 3]);
        assert_eq!(g.edge_index(2, 1), Some(1));
        assert!(g.has_edge(3, 1));
        assert!(!g.has_edge(0, 3));
    }

    #[test]
    fn shortest_path_prefers_low_ids() {
        // 4-cycle 0-1-3-2-0: two shortest routes from 0 to 3
        let g = Graph::new(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]).unwrap();
        assert_eq!(g.shortest_path(0, 3).unwrap(), vec![0, 1, 3]);
        assert_eq!(g.diameter(), 2);
    }

    #[test]
    fn grid_numbering_skips_blocked_cells() {
        let blocked = [false, true, false, false];
        let (g, cells) = grid_graph(2, 2, &blocked).unwrap();
        assert_eq!(cells, vec![0, 2, 3]);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn path_padding() {
        let p = Path::new(vec![0, 1]);
        assert_eq!(p.padded(3).vertices, vec![0, 1, 1, 1]);
        assert!(!Path::new(vec![0, 1, 0]).is_simple());
    }
}
