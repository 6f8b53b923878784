//! Simple undirected graphs, used as input to the coloring reduction and
//! the chromatic-number oracle.

use alloc::vec::Vec;

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

impl SimpleGraph {
    /// Builds a graph; parallel edges are merged, endpoints normalised to
    /// `(min, max)` and edges kept in first-seen order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !out.contains(&e) {
                out.push(e);
            }
        }
        Ok(Self { n, edges: out })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let mut adj = alloc::vec![alloc::vec![false; self.n]; self.n];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Self { n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
        Self { n, edges }
    }

    /// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::new(10, &edges).expect("petersen graph is simple")
    }

    /// Built-in graphs by name: `k3`, `k4`, `c5`, `petersen`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "k3" => Some(Self::complete(3)),
            "k4" => Some(Self::complete(4)),
            "c5" => Some(Self::cycle(5)),
            "petersen" => Some(Self::petersen()),
            _ => None,
        }
    }
}

pub const NAMED_GRAPHS: [&str; 4] = ["k3", "k4", "c5", "petersen"];
