use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_degrees, words_for, BestResponseTable, GraphicalGame, Origin};
use crate::error::Result;
use crate::graph::Graph;

/// Uniform random game on `g`: every row of every table is a fair bit.
///
/// Tables are filled in vertex order from one ChaCha8 stream, 64 rows per
/// draw, so the result is a pure function of `(g, seed)`.
pub fn sample_game(g: &Graph, seed: u64) -> Result<GraphicalGame> {
    check_degrees(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables = (0..g.n())
        .map(|v| {
            let order = g.neighbors(v).to_vec();
            let words = (0..words_for(1 << order.len())).map(|_| rng.next_u64()).collect();
            BestResponseTable::from_words(v, order, words)
        })
        .collect();
    Ok(GraphicalGame { graph: g.clone(), tables, origin: Origin::SampledDirect })
}

/// Real-valued payoffs: for vertex `v`, `values[v][a * 2^deg + r]` is the
/// payoff of action `a` against neighbour row `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTables {
    graph: Graph,
    values: Vec<Vec<f64>>,
}

impl PayoffTables {
    pub fn new(graph: Graph, values: Vec<Vec<f64>>) -> Result<Self> {
        check_degrees(&graph)?;
        for (v, vals) in values.iter().enumerate() {
            let want = 2usize << graph.degree(v);
            if vals.len() != want {
                return Err(crate::Error::InvalidParam(format!(
                    "player {} has {} payoffs, expected {want}",
                    v + 1,
                    vals.len()
                )));
            }
        }
        if values.len() != graph.n() {
            return Err(crate::Error::InvalidParam("one payoff table per player required".into()));
        }
        Ok(PayoffTables { graph, values })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn player(&self, v: usize) -> &[f64] {
        &self.values[v]
    }

    pub fn payoff(&self, v: usize, action: u8, row: usize) -> f64 {
        self.values[v][((action as usize) << self.graph.degree(v)) + row]
    }
}

/// I.i.d. `U[0,1)` payoffs, vertex by vertex, action 0 block first.
pub fn sample_payoffs(g: &Graph, seed: u64) -> Result<PayoffTables> {
    check_degrees(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.n()).map(|v| (0..2usize << g.degree(v)).map(|_| rng.random::<f64>()).collect()).collect();
    Ok(PayoffTables { graph: g.clone(), values })
}

/// Best-response game of a payoff game. Equal payoffs resolve to action 0
/// and are counted in [`Origin::DerivedFromPayoffs`].
pub fn derive_best_response(payoffs: &PayoffTables) -> GraphicalGame {
    let g = &payoffs.graph;
    let mut ties = 0u64;
    let tables = (0..g.n())
        .map(|v| {
            let rows = 1usize << g.degree(v);
            let vals = &payoffs.values[v];
            BestResponseTable::from_fn(v, g.neighbors(v).to_vec(), |r| {
                let (u0, u1) = (vals[r], vals[rows + r]);
                if u0 == u1 {
                    ties += 1;
                }
                u1 > u0
            })
        })
        .collect();
    GraphicalGame { graph: g.clone(), tables, origin: Origin::DerivedFromPayoffs { ties } }
}
