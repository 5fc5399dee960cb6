use std::collections::VecDeque;

use super::Graph;
use crate::error::{Error, Result};

/// Largest graph accepted by the exhaustive expander check (`2^24` subsets).
pub const EXPANDER_MAX_VERTICES: usize = 24;

/// Edges whose two endpoints both have degree at most `d`, in canonical order.
pub fn d_bounded_edges(g: &Graph, d: usize) -> Vec<(usize, usize)> {
    g.edges().iter().copied().filter(|&(u, v)| g.degree(u) <= d && g.degree(v) <= d).collect()
}

/// Greedy vertex-disjoint subset of `edges`, scanning in the given order.
pub fn greedy_disjoint_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut used = vec![false; n];
    let mut chosen = Vec::new();
    for &(u, v) in edges {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            chosen.push((u, v));
        }
    }
    chosen
}

/// Natural log of `8^(-2^(du + dv - 2))`, the chance that an edge with end
/// degrees `du`, `dv` carries an indifferent matching pennies game.
pub fn edge_imp_probability_ln(du: usize, dv: usize) -> f64 {
    let exponent = (du + dv) as i32 - 2;
    -(2f64.powi(exponent)) * 8f64.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependentEdgeSet {
    pub edges: Vec<(usize, usize)>,
    /// Sum of `-ln(1 - p_e)` over the chosen edges.
    pub weight: f64,
}

/// Greedy maximal matching by descending edge weight `-ln(1 - p_uv)`.
///
/// The weight is strictly decreasing in `du + dv`, so sorting by the degree
/// sum (then canonical order) gives the weight order without comparing
/// floats that may have underflowed to zero.
pub fn weighted_independent_edge_set(g: &Graph) -> IndependentEdgeSet {
    let mut order: Vec<(usize, usize)> = g.edges().to_vec();
    order.sort_by_key(|&(u, v)| (g.degree(u) + g.degree(v), u, v));
    let edges = greedy_disjoint_edges(g.n(), &order);
    let weight = edges
        .iter()
        .map(|&(u, v)| {
            let p = edge_imp_probability_ln(g.degree(u), g.degree(v)).exp();
            -(-p).ln_1p()
        })
        .sum();
    IndependentEdgeSet { edges, weight }
}

/// Maximal connected vertex sets, each sorted, listed by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Vertices adjacent to at least one member of `vset`. Members of `vset`
/// appear only if they have a neighbour inside it.
pub fn neighborhood(g: &Graph, vset: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; g.n()];
    for &u in vset {
        for &w in g.neighbors(u) {
            hit[w] = true;
        }
    }
    (0..g.n()).filter(|&w| hit[w]).collect()
}

pub fn is_strong_expander(g: &Graph, alpha: f64, delta: f64) -> Result<bool> {
    Ok(expander_violation(g, alpha, delta)?.is_none())
}

/// First subset (in Gray-code order) breaking the strong `(alpha, delta)`
/// expansion property, or `None` if the graph is a strong expander.
///
/// Walks all `2^n - 1` nonempty subsets, adding or removing one vertex per
/// step and keeping, for every vertex, how many members of the current
/// subset it is adjacent to.
pub fn expander_violation(g: &Graph, alpha: f64, delta: f64) -> Result<Option<Vec<usize>>> {
    let n = g.n();
    if n > EXPANDER_MAX_VERTICES {
        return Err(Error::size_limit("expander check vertex count", EXPANDER_MAX_VERTICES, n));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParam(format!("alpha must be positive, got {alpha}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParam(format!("delta must lie in (0,1], got {delta}")));
    }

    let small_limit = delta * n as f64;
    let mut hits = vec![0u32; n];
    let mut covered = 0usize;
    let mut members = 0u32;
    let mut size = 0usize;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let adding = members & (1 << v) == 0;
        members ^= 1 << v;
        if adding {
            size += 1;
            for &w in g.neighbors(v) {
                if hits[w] == 0 {
                    covered += 1;
                }
                hits[w] += 1;
            }
        } else {
            size -= 1;
            for &w in g.neighbors(v) {
                hits[w] -= 1;
                if hits[w] == 0 {
                    covered -= 1;
                }
            }
        }

        let ok = if size as f64 <= small_limit { covered as f64 >= alpha * size as f64 } else { covered == n };
        if !ok {
            return Ok(Some((0..n).filter(|&u| members & (1 << u) != 0).collect()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_empty, gen_path};

    #[test]
    fn d_bounded_on_paths() {
        let p4 = gen_path(4);
        assert!(d_bounded_edges(&p4, 1).is_empty());
        assert_eq!(d_bounded_edges(&p4, 2), p4.edges());
        let g = gen_complete(5).disjoint_union(&gen_path(2));
        assert_eq!(d_bounded_edges(&g, 1), vec![(5, 6)]);
    }

    #[test]
    fn weighted_set_single_edge() {
        let set = weighted_independent_edge_set(&gen_path(2));
        assert_eq!(set.edges, vec![(0, 1)]);
        assert!((set.weight - (8.0f64 / 7.0).ln()).abs() < 1e-12);
        assert!((set.weight - 0.13353).abs() < 1e-5);
    }

    #[test]
    fn weighted_set_path3() {
        let set = weighted_independent_edge_set(&gen_path(3));
        assert_eq!(set.edges.len(), 1);
        let expect = -(1.0 - 8f64.powi(-2)).ln();
        assert!((set.weight - expect).abs() < 1e-15);
    }

    #[test]
    fn weighted_set_prefers_light_degrees() {
        // Star centre 0 with leaves 1..4, plus a pendant path 4-5: the edge
        // (4,5) has degree sum 3, every star edge at least 5.
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5)]).unwrap();
        let set = weighted_independent_edge_set(&g);
        assert_eq!(set.edges, vec![(4, 5), (0, 1)]);
    }

    #[test]
    fn weighted_set_empty() {
        let set = weighted_independent_edge_set(&gen_empty(4));
        assert!(set.edges.is_empty());
        assert_eq!(set.weight, 0.0);
    }

    #[test]
    fn tiny_weights_do_not_vanish_early() {
        // degree sum 8: p = 8^-64 = 2^-192, far below 1 - eps.
        assert!(edge_imp_probability_ln(4, 4).exp() > 0.0);
        let w = -(-edge_imp_probability_ln(4, 4).exp()).ln_1p();
        assert!(w > 0.0);
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&gen_empty(3)), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(connected_components(&gen_path(4)), vec![vec![0, 1, 2, 3]]);
        let g = gen_complete(3).disjoint_union(&gen_path(2));
        assert_eq!(connected_components(&g), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn neighborhoods() {
        assert_eq!(neighborhood(&gen_path(3), &[1]), vec![0, 2]);
        assert_eq!(neighborhood(&gen_complete(4), &[0]), vec![1, 2, 3]);
        assert_eq!(neighborhood(&gen_complete(3), &[0, 1]), vec![0, 1, 2]);
    }

    #[test]
    fn expander_examples() {
        assert!(is_strong_expander(&gen_complete(8), 2.0, 0.25).unwrap());
        assert_eq!(expander_violation(&gen_path(8), 2.0, 0.25).unwrap(), Some(vec![0]));
        assert!(!is_strong_expander(&gen_empty(4), 0.1, 0.5).unwrap());
        assert!(matches!(is_strong_expander(&gen_empty(25), 1.0, 0.5), Err(Error::SizeLimitExceeded { .. })));
        assert!(is_strong_expander(&gen_path(3), 0.0, 0.5).is_err());
        assert!(is_strong_expander(&gen_path(3), 1.0, 1.5).is_err());
    }
}
