use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Parameters of an Erdős–Rényi draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl GnpParams {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self> {
        let params = GnpParams { n, p, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParam("G(n,p) needs n >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParam(format!("edge probability {} not in [0,1]", self.p)));
        }
        Ok(())
    }
}

/// Each of the `n(n-1)/2` pairs is an edge independently with probability
/// `p`. Pairs are visited in lexicographic order, one uniform draw each, so
/// the graph is a pure function of `(n, p, seed)`.
pub fn gen_gnp(params: &GnpParams) -> Result<Graph> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < params.p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_canonical(n, edges))
}

pub fn gen_complete(n: usize) -> Graph {
    assert!(n >= 1, "graph needs at least one vertex");
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::from_canonical(n, edges)
}

pub fn gen_empty(n: usize) -> Graph {
    assert!(n >= 1, "graph needs at least one vertex");
    Graph::from_canonical(n, Vec::new())
}

pub fn gen_path(n: usize) -> Graph {
    assert!(n >= 1, "graph needs at least one vertex");
    let edges = (0..n.saturating_sub(1)).map(|u| (u, u + 1)).collect();
    Graph::from_canonical(n, edges)
}

/// `rows x cols` lattice, vertex `(r, c)` numbered `r * cols + c`.
pub fn gen_grid(rows: usize, cols: usize) -> Graph {
    assert!(rows >= 1 && cols >= 1, "grid needs at least one row and column");
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    edges.sort_unstable();
    Graph::from_canonical(rows * cols, edges)
}
