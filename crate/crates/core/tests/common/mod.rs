//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nashphase::game::{BestResponseTable, GraphicalGame, Origin, Profile};
use nashphase::graph::Graph;
use nashphase::witness::is_indifferent_mp;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn binom(n: usize, k: usize) -> BigRational {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(c)
}

pub fn pow(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

pub fn exact_s(n: usize, q: &BigRational) -> BigRational {
    let scale = pow(&rat(1, 2), n);
    (1..=n).fold(BigRational::zero(), |acc, s| {
        let x = pow(q, s);
        let one = BigRational::one();
        let gap = pow(&(&one + &x), n - s) - pow(&(&one - &x), n - s);
        acc + binom(n, s) * &scale * gap
    })
}

pub fn exact_r(n: usize, q: &BigRational) -> BigRational {
    let scale = pow(&rat(1, 2), n);
    (1..=n).fold(BigRational::zero(), |acc, s| {
        let m = BigRational::from_integer(BigInt::from(n)) * pow(q, s - 1);
        let m = if m > BigRational::one() { BigRational::one() } else { m };
        acc + binom(n, s) * &scale * m
    })
}

/// Every labelled graph on `n` vertices.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            Graph::from_edges(n, edges).unwrap()
        })
        .collect()
}

/// `P[i and j are both equilibria]`, by enumerating each player's tables.
pub fn joint_probability(g: &Graph, i: u64, j: u64) -> BigRational {
    (0..g.n()).fold(BigRational::one(), |acc, k| {
        let rows = 1usize << g.degree(k);
        let mut hits = 0i64;
        for code in 0u64..1 << rows {
            let t = BestResponseTable::from_fn(k, g.neighbors(k).to_vec(), |r| (code >> r) & 1 == 1);
            let ok_i = t.reply(t.row_of(Profile(i))) as u64 == (i >> k) & 1;
            let ok_j = t.reply(t.row_of(Profile(j))) as u64 == (j >> k) & 1;
            hits += (ok_i && ok_j) as i64;
        }
        acc * rat(hits, 1 << rows)
    })
}

/// Edge (0, 1) with end degrees (da, db); extra leaves hang off each end.
pub fn edge_with_degrees(da: usize, db: usize) -> Graph {
    let mut edges = vec![(0, 1)];
    let mut next = 2;
    for _ in 1..da {
        edges.push((0, next));
        next += 1;
    }
    for _ in 1..db {
        edges.push((1, next));
        next += 1;
    }
    Graph::from_edges(next, edges).unwrap()
}

/// Every (table_a, table_b) pair on the edge, as whole games.
pub fn literal_pair_count(da: usize, db: usize) -> (u64, u64) {
    let g = edge_with_degrees(da, db);
    let (ra, rb) = (1usize << da, 1usize << db);
    let mut accepted = 0u64;
    for ca in 0u64..1 << ra {
        for cb in 0u64..1 << rb {
            let tables = (0..g.n())
                .map(|v| {
                    let code = match v {
                        0 => ca,
                        1 => cb,
                        _ => 0,
                    };
                    BestResponseTable::from_fn(v, g.neighbors(v).to_vec(), |r| (code >> r) & 1 == 1)
                })
                .collect();
            let game = GraphicalGame::new(g.clone(), tables, Origin::Explicit).unwrap();
            accepted += is_indifferent_mp(&game, 0, 1).unwrap().is_some() as u64;
        }
    }
    (accepted, 1u64 << (ra + rb))
}

/// Strong `(alpha, delta)` expansion straight from the definition: every
/// vertex set of size at most `delta n` has at least `alpha |S|` vertices
/// adjacent to it, and every larger set is adjacent to all of `V`.
pub fn expander_by_definition(g: &Graph, alpha: f64, delta: f64) -> bool {
    let n = g.n();
    (1u64..1 << n).all(|s| {
        let size = s.count_ones() as usize;
        let adjacent = (0..n).filter(|&w| g.neighbors(w).iter().any(|&u| s >> u & 1 == 1)).count();
        if size as f64 <= delta * n as f64 {
            adjacent as f64 >= alpha * size as f64
        } else {
            adjacent == n
        }
    })
}
