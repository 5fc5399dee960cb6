//! Undirected simple graphs, the interaction structure of a graphical game.
//!
//! Vertices are `0..n` inside the library. The text formats and the CLI
//! present them 1-based, so vertex `v` here is player `v + 1` on disk.

mod generate;
mod io;
mod structure;

pub use generate::{gen_complete, gen_empty, gen_gnp, gen_grid, gen_path, GnpParams};
pub(crate) use io::{parse_graph_lines, strip_comment};
pub use io::{read_graph, write_graph};
pub use structure::{
    connected_components, d_bounded_edges, edge_imp_probability_ln, expander_violation, greedy_disjoint_edges,
    is_strong_expander, neighborhood, weighted_independent_edge_set, IndependentEdgeSet, EXPANDER_MAX_VERTICES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialized as `{"n": .., "edges": [[u, v], ..]}` with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr { n: g.n, edges: g.edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect() }
    }
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        if let Some(e) = r.edges.iter().find(|e| e[0] == 0 || e[1] == 0) {
            return Err(Error::InvalidParam(format!("vertex 0 in edge {e:?}; vertices are 1-based")));
        }
        Graph::from_edges(r.n, r.edges.iter().map(|e| (e[0] - 1, e[1] - 1)))
    }
}

impl Graph {
    /// Builds a graph from 0-based edges. Pairs may come in either
    /// orientation; self-loops, duplicates and out-of-range ends are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::InvalidParam("graph must have at least one vertex".into()));
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParam(format!("edge ({}, {}) out of range for n = {n}", a + 1, b + 1)));
            }
            if a == b {
                return Err(Error::InvalidParam(format!("self-loop at vertex {}", a + 1)));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam(format!("duplicate edge ({}, {})", w[0].0 + 1, w[0].1 + 1)));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must already be sorted, unique and oriented `u < v`.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, adj, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Neighbour set of `v` as a bitmask. Only meaningful for `n <= 64`.
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.adj[v].iter().fold(0u64, |m, &w| m | (1u64 << w))
    }

    /// Subgraph induced by `vertices` (sorted, distinct), relabelled
    /// `0..vertices.len()` in the same order. Relative neighbour order is
    /// preserved, so best-response rows keep their meaning.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        Graph::from_canonical(vertices.len(), edges)
    }

    /// `self` followed by `other`, with `other`'s vertices shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges =
            self.edges.iter().copied().chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift))).collect();
        Graph::from_canonical(self.n + other.n, edges)
    }
}
