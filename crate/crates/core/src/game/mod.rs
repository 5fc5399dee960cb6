//! Binary-action graphical games described by best-response tables.
//!
//! Conventions used everywhere in the crate:
//! * a [`Profile`] is an integer whose bit `v` is the action of vertex `v`
//!   (least significant bit = first player);
//! * row `r` of a vertex's table is the neighbour configuration whose bit
//!   `j` is the action of the `j`-th smallest neighbour.

mod io;
mod sample;

pub use io::{read_game, write_game};
pub use sample::{derive_best_response, sample_game, sample_payoffs, PayoffTables};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest degree for which a table is materialised (`2^26` rows, 8 MiB).
pub const MAX_TABLE_DEGREE: usize = 26;

/// Strategy profile: bit `v` is the action of vertex `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Profile(pub u64);

impl Profile {
    #[inline]
    pub fn action(self, v: usize) -> u8 {
        ((self.0 >> v) & 1) as u8
    }

    #[inline]
    pub fn flipped(self, v: usize) -> Profile {
        Profile(self.0 ^ (1 << v))
    }

    /// `self XOR other`, the translation used for dependence neighbourhoods.
    #[inline]
    pub fn xor(self, other: Profile) -> Profile {
        Profile(self.0 ^ other.0)
    }

    /// Actions of players `1..=n` as a string, player 1 first.
    pub fn to_action_string(self, n: usize) -> String {
        (0..n).map(|v| if self.action(v) == 1 { '1' } else { '0' }).collect()
    }
}

/// One player's best reply for every neighbour configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponseTable {
    owner: usize,
    neighbor_order: Vec<usize>,
    words: Vec<u64>,
}

#[inline]
fn words_for(rows: usize) -> usize {
    rows.div_ceil(64)
}

impl BestResponseTable {
    /// Table with every row set by `f(row)`.
    pub fn from_fn(owner: usize, neighbor_order: Vec<usize>, mut f: impl FnMut(usize) -> bool) -> Self {
        let rows = 1usize << neighbor_order.len();
        let mut words = vec![0u64; words_for(rows)];
        for r in 0..rows {
            if f(r) {
                words[r / 64] |= 1 << (r % 64);
            }
        }
        BestResponseTable { owner, neighbor_order, words }
    }

    pub(crate) fn from_words(owner: usize, neighbor_order: Vec<usize>, mut words: Vec<u64>) -> Self {
        let rows = 1usize << neighbor_order.len();
        debug_assert_eq!(words.len(), words_for(rows));
        if rows < 64 {
            words[0] &= (1u64 << rows) - 1;
        }
        BestResponseTable { owner, neighbor_order, words }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn neighbor_order(&self) -> &[usize] {
        &self.neighbor_order
    }

    pub fn degree(&self) -> usize {
        self.neighbor_order.len()
    }

    /// Number of rows, `2^degree`.
    pub fn len(&self) -> usize {
        1 << self.neighbor_order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Best reply (0 or 1) in row `row`.
    #[inline]
    pub fn reply(&self, row: usize) -> u8 {
        ((self.words[row / 64] >> (row % 64)) & 1) as u8
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Row index for the neighbour actions in `profile`.
    #[inline]
    pub fn row_of(&self, profile: Profile) -> usize {
        self.neighbor_order.iter().enumerate().fold(0usize, |r, (j, &w)| r | ((profile.action(w) as usize) << j))
    }

    /// Rows as a `0`/`1` string, row 0 first.
    pub fn bitstring(&self) -> String {
        (0..self.len()).map(|r| if self.reply(r) == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    /// Every table row drawn as an independent fair bit.
    SampledDirect,
    /// Argmax of sampled payoffs; `ties` rows had equal payoffs and fell to 0.
    DerivedFromPayoffs { ties: u64 },
    /// Built by hand or read from a file.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicalGame {
    graph: Graph,
    tables: Vec<BestResponseTable>,
    origin: Origin,
}

impl GraphicalGame {
    /// Checks that table `v` belongs to `v` and is indexed by `v`'s sorted
    /// neighbours.
    pub fn new(graph: Graph, tables: Vec<BestResponseTable>, origin: Origin) -> Result<Self> {
        if tables.len() != graph.n() {
            return Err(Error::InvalidParam(format!("{} tables for {} players", tables.len(), graph.n())));
        }
        for (v, t) in tables.iter().enumerate() {
            if t.owner != v || t.neighbor_order != graph.neighbors(v) {
                return Err(Error::InvalidParam(format!(
                    "table {} does not match the neighbourhood of player {}",
                    t.owner + 1,
                    v + 1
                )));
            }
        }
        Ok(GraphicalGame { graph, tables, origin })
    }

    /// Game whose table rows are `f(v, row)`.
    pub fn from_fn(graph: Graph, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_degrees(&graph)?;
        let tables =
            (0..graph.n()).map(|v| BestResponseTable::from_fn(v, graph.neighbors(v).to_vec(), |r| f(v, r))).collect();
        Ok(GraphicalGame { graph, tables, origin: Origin::Explicit })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn table(&self, v: usize) -> &BestResponseTable {
        &self.tables[v]
    }

    pub fn tables(&self) -> &[BestResponseTable] {
        &self.tables
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Whether `v`'s action in `profile` is its best reply to its neighbours.
    #[inline]
    pub fn is_best_response(&self, v: usize, profile: Profile) -> bool {
        let t = &self.tables[v];
        t.reply(t.row_of(profile)) == profile.action(v)
    }

    pub fn is_pne(&self, profile: Profile) -> bool {
        (0..self.n()).all(|v| self.is_best_response(v, profile))
    }

    /// Subgame on `vertices` (sorted), relabelled `0..len`.
    pub fn subgame(&self, vertices: &[usize]) -> GraphicalGame {
        let graph = self.graph.induced(vertices);
        let tables = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| BestResponseTable {
                owner: i,
                neighbor_order: graph.neighbors(i).to_vec(),
                words: self.tables[v].words.clone(),
            })
            .collect();
        GraphicalGame { graph, tables, origin: self.origin }
    }
}

pub(crate) fn check_degrees(graph: &Graph) -> Result<()> {
    let d = graph.max_degree();
    if d > MAX_TABLE_DEGREE {
        return Err(Error::size_limit("best-response table degree", MAX_TABLE_DEGREE, d));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_empty, gen_path};
    use proptest::prelude::*;

    #[test]
    fn isolated_player() {
        let g = GraphicalGame::from_fn(gen_empty(1), |_, _| true).unwrap();
        assert!(g.is_best_response(0, Profile(1)));
        assert!(!g.is_best_response(0, Profile(0)));
    }

    #[test]
    fn single_edge_lookup() {
        // Player 0 matches player 1; player 1 plays 0 always.
        let g = GraphicalGame::from_fn(gen_path(2), |v, r| v == 0 && r == 1).unwrap();
        // profile (a=0, b=1): a should play 1
        let prof = Profile(0b10);
        assert!(!g.is_best_response(0, prof));
        assert!(g.is_best_response(0, Profile(0b11)));
    }

    #[test]
    fn row_order_follows_sorted_neighbours() {
        let g = gen_path(3);
        let game = GraphicalGame::from_fn(g, |_, _| false).unwrap();
        let t = game.table(1);
        assert_eq!(t.neighbor_order(), &[0, 2]);
        assert_eq!(t.row_of(Profile(0b001)), 1);
        assert_eq!(t.row_of(Profile(0b100)), 2);
        assert_eq!(t.row_of(Profile(0b111)), 3);
    }

    #[test]
    fn empty_graph_has_one_equilibrium() {
        let game = sample_game(&gen_empty(5), 3).unwrap();
        let target = (0..5).fold(0u64, |p, v| p | (game.table(v).reply(0) as u64) << v);
        for prof in 0..32u64 {
            assert_eq!(game.is_pne(Profile(prof)), prof == target);
        }
    }

    #[test]
    fn matching_pennies_has_no_equilibrium() {
        let game = GraphicalGame::from_fn(gen_path(2), |v, r| if v == 0 { r == 1 } else { r == 0 }).unwrap();
        assert!((0..4).all(|p| !game.is_pne(Profile(p))));
    }

    #[test]
    fn new_rejects_mismatched_tables() {
        let g = gen_path(2);
        let t0 = BestResponseTable::from_fn(0, vec![1], |_| false);
        let t1 = BestResponseTable::from_fn(1, vec![], |_| false);
        assert!(GraphicalGame::new(g, vec![t0, t1], Origin::Explicit).is_err());
    }

    proptest! {
        #[test]
        fn exactly_one_action_is_a_best_response(seed in any::<u64>(), prof in 0u64..256, v in 0usize..8) {
            let g = crate::graph::gen_gnp(&crate::graph::GnpParams::new(8, 0.4, seed).unwrap()).unwrap();
            let game = sample_game(&g, seed ^ 0x55).unwrap();
            let p = Profile(prof);
            prop_assert!(game.is_best_response(v, p) != game.is_best_response(v, p.flipped(v)));
        }

        #[test]
        fn pne_implies_every_best_response(seed in any::<u64>(), prof in 0u64..64) {
            let g = crate::graph::gen_gnp(&crate::graph::GnpParams::new(6, 0.5, seed).unwrap()).unwrap();
            let game = sample_game(&g, seed).unwrap();
            let p = Profile(prof);
            if game.is_pne(p) {
                prop_assert!((0..6).all(|v| game.is_best_response(v, p)));
            }
        }
    }
}
