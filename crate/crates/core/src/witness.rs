//! Certificates that a game has no pure Nash equilibrium.
//!
//! The certificate is an edge `(a, b)` on which one endpoint always wants
//! to copy the other and the other always wants to do the opposite, no
//! matter what their remaining neighbours play. In any profile one of the
//! two is then not best-responding.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BestResponseTable, GraphicalGame};
use crate::graph::{
    d_bounded_edges, edge_imp_probability_ln, greedy_disjoint_edges, weighted_independent_edge_set, Graph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    IndifferentMatchingPennies,
    /// Found by the exposure search on an edge isolated among the surviving
    /// vertices.
    IsolatedMatchingPennies,
}

impl WitnessKind {
    fn tag(self) -> &'static str {
        match self {
            WitnessKind::IndifferentMatchingPennies => "indifferent-matching-pennies",
            WitnessKind::IsolatedMatchingPennies => "isolated-matching-pennies",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    /// Best reply equals the partner's action in every row.
    pub matcher: usize,
    /// Best reply is the negation of the partner's action in every row.
    pub mismatcher: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub edge: (usize, usize),
    pub orientation: Orientation,
    /// Table rows examined on the two endpoints.
    pub checked_rows: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stance {
    Match,
    Mismatch,
}

/// Whether every row of `table` answers the neighbour at row-bit `pos`
/// with the given stance.
fn table_takes_stance(table: &BestResponseTable, pos: usize, stance: Stance) -> bool {
    let flip = (stance == Stance::Mismatch) as u8;
    (0..table.len()).all(|r| table.reply(r) == ((r >> pos) & 1) as u8 ^ flip)
}

fn row_bit_of(table: &BestResponseTable, partner: usize) -> usize {
    table.neighbor_order().binary_search(&partner).expect("partner is a neighbour")
}

/// Orientation under which `(a, b)` plays indifferent matching pennies.
pub fn is_indifferent_mp(game: &GraphicalGame, a: usize, b: usize) -> Result<Option<Orientation>> {
    if !game.graph().has_edge(a, b) {
        return Err(Error::EdgeAbsent(a + 1, b + 1));
    }
    let (ta, tb) = (game.table(a), game.table(b));
    let (pa, pb) = (row_bit_of(ta, b), row_bit_of(tb, a));
    if table_takes_stance(ta, pa, Stance::Match) && table_takes_stance(tb, pb, Stance::Mismatch) {
        return Ok(Some(Orientation { matcher: a, mismatcher: b }));
    }
    if table_takes_stance(tb, pb, Stance::Match) && table_takes_stance(ta, pa, Stance::Mismatch) {
        return Ok(Some(Orientation { matcher: b, mismatcher: a }));
    }
    Ok(None)
}

fn report_for(
    game: &GraphicalGame,
    kind: WitnessKind,
    edge: (usize, usize),
    orientation: Orientation,
) -> WitnessReport {
    WitnessReport { kind, edge, orientation, checked_rows: game.table(edge.0).len() + game.table(edge.1).len() }
}

/// First `d`-bounded edge (canonical order) carrying indifferent matching
/// pennies. Costs `O(m 2^(d+1))` for `m` such edges.
pub fn find_witness(game: &GraphicalGame, d: usize) -> Option<WitnessReport> {
    d_bounded_edges(game.graph(), d).into_iter().find_map(|(u, v)| {
        is_indifferent_mp(game, u, v)
            .expect("edge comes from the graph")
            .map(|o| report_for(game, WitnessKind::IndifferentMatchingPennies, (u, v), o))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExposureStep {
    /// The smallest surviving vertex at this iteration.
    pub examined: usize,
    pub removed: Vec<usize>,
    /// Set when the iteration tested an edge isolated within the survivors.
    pub tested: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExposureTrace {
    pub steps: Vec<ExposureStep>,
    pub witness: Option<WitnessReport>,
}

/// Vertex-exposure search for an edge that is isolated among the surviving
/// vertices and plays matching pennies.
pub fn exposure_search(game: &GraphicalGame) -> Option<WitnessReport> {
    exposure_trace(game).witness
}

/// Runs the exposure loop while at least half the vertices survive:
///
/// * take the smallest survivor `j`;
/// * if `j` has no surviving neighbour or several, remove `j` and them;
/// * otherwise, with `j'` its only surviving neighbour: if `j'` has another
///   surviving neighbour, remove `j`, `j'` and the survivors adjacent to `j'`;
/// * otherwise test `(j, j')` and remove both.
///
/// The test on `(j, j')` is the indifferent check, which for an edge that is
/// isolated in the whole graph is plain matching pennies; an edge isolated
/// only among survivors may still have removed neighbours, and the
/// indifferent check keeps the certificate sound in that case.
pub fn exposure_trace(game: &GraphicalGame) -> ExposureTrace {
    let g = game.graph();
    let n = g.n();
    let mut alive = vec![true; n];
    let mut alive_count = n;
    let mut next_min = 0usize;
    let mut steps = Vec::new();
    let alive_neighbors =
        |alive: &[bool], v: usize| -> Vec<usize> { g.neighbors(v).iter().copied().filter(|&w| alive[w]).collect() };

    while 2 * alive_count >= n && alive_count > 0 {
        while !alive[next_min] {
            next_min += 1;
        }
        let j = next_min;
        let nj = alive_neighbors(&alive, j);
        let mut removed = vec![j];
        let mut tested = None;
        let mut witness = None;
        if nj.len() != 1 {
            removed.extend(nj);
        } else {
            let jp = nj[0];
            let njp = alive_neighbors(&alive, jp);
            removed.push(jp);
            if njp.iter().any(|&w| w != j) {
                removed.extend(njp.into_iter().filter(|&w| w != j));
            } else {
                let edge = (j.min(jp), j.max(jp));
                tested = Some(edge);
                witness = is_indifferent_mp(game, edge.0, edge.1)
                    .expect("tested pair is an edge")
                    .map(|o| report_for(game, WitnessKind::IsolatedMatchingPennies, edge, o));
            }
        }
        for &v in &removed {
            alive[v] = false;
        }
        alive_count -= removed.len();
        steps.push(ExposureStep { examined: j, removed, tested });
        if witness.is_some() {
            return ExposureTrace { steps, witness };
        }
    }
    ExposureTrace { steps, witness: None }
}

/// Exact fraction of `(table_a, table_b)` pairs on an edge with end degrees
/// `(d_a, d_b)` that form indifferent matching pennies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactFraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl ExactFraction {
    fn reduced(numerator: u64, denominator: u64) -> Self {
        let (mut a, mut b) = (numerator, denominator);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        let g = a.max(1);
        ExactFraction { numerator: numerator / g, denominator: denominator / g }
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Enumerates every table of each endpoint and counts the matcher and
/// mismatcher tables with the same row test as [`is_indifferent_mp`]. The
/// two orientations are disjoint, so accepted pairs number
/// `match_a * mismatch_b + mismatch_a * match_b`.
pub fn witness_probability_exact(d_a: usize, d_b: usize) -> Result<ExactFraction> {
    if !(1..=4).contains(&d_a) || !(1..=4).contains(&d_b) {
        return Err(Error::DegreeTooLarge(d_a, d_b));
    }
    let side = |d: usize| -> (u64, u64) {
        // partner placed at row bit 0; the other d-1 neighbours are 1..d
        let order: Vec<usize> = (1..=d).collect();
        let rows = 1usize << d;
        let (mut matchers, mut mismatchers) = (0u64, 0u64);
        for code in 0u64..1 << rows {
            let table = BestResponseTable::from_fn(0, order.clone(), |r| (code >> r) & 1 == 1);
            matchers += table_takes_stance(&table, 0, Stance::Match) as u64;
            mismatchers += table_takes_stance(&table, 0, Stance::Mismatch) as u64;
        }
        (matchers, mismatchers)
    };
    let (ma, xa) = side(d_a);
    let (mb, xb) = side(d_b);
    let accepted = ma * xb + xa * mb;
    let total_bits = (1u32 << d_a) + (1u32 << d_b);
    Ok(ExactFraction::reduced(accepted, 1u64 << total_bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceBounds {
    pub degree_cap: usize,
    /// `d`-bounded edges in the graph.
    pub bounded_edges: usize,
    /// Size of a greedy vertex-disjoint subset of them.
    pub disjoint_edges: usize,
    /// `1 - exp(-m p_imp)` over the vertex-disjoint edges.
    pub disjoint_bound: f64,
    /// `1 - exp(-(m / 2d) p_imp)` over all bounded edges.
    pub bounded_bound: f64,
    /// Weight of the greedy weighted independent edge set.
    pub weight: f64,
    /// `1 - exp(-weight)`.
    pub weighted_bound: f64,
}

/// `ln(8^(-2^(2d-2)))`, the per-edge witness probability of a `d`-bounded edge.
pub fn p_imp_ln(d: usize) -> f64 {
    edge_imp_probability_ln(d, d)
}

/// Lower bounds on the probability that a random game on `g` has no
/// equilibrium, from `d`-bounded edges and from the weighted edge set.
pub fn nonexistence_probability_bound(g: &Graph, d: usize) -> NonexistenceBounds {
    let bounded = d_bounded_edges(g, d);
    let disjoint = greedy_disjoint_edges(g.n(), &bounded);
    let tail = |rate: f64| if rate > 0.0 { -(-rate).exp_m1() } else { 0.0 };
    let (disjoint_bound, bounded_bound) = if bounded.is_empty() {
        (0.0, 0.0)
    } else {
        let p = p_imp_ln(d).exp();
        (tail(disjoint.len() as f64 * p), tail(bounded.len() as f64 / (2 * d) as f64 * p))
    };
    let set = weighted_independent_edge_set(g);
    NonexistenceBounds {
        degree_cap: d,
        bounded_edges: bounded.len(),
        disjoint_edges: disjoint.len(),
        disjoint_bound,
        bounded_bound,
        weight: set.weight,
        weighted_bound: tail(set.weight),
    }
}

/// Certificate block: kind, edge, orientation and both tables, 1-based.
pub fn write_certificate(report: &WitnessReport, game: &GraphicalGame) -> String {
    let (u, v) = report.edge;
    let mut out = String::from("certificate\n");
    writeln!(out, "kind: {}", report.kind.tag()).unwrap();
    writeln!(out, "edge: {} {}", u + 1, v + 1).unwrap();
    writeln!(out, "matcher: {}", report.orientation.matcher + 1).unwrap();
    writeln!(out, "mismatcher: {}", report.orientation.mismatcher + 1).unwrap();
    for w in [u, v] {
        writeln!(out, "table {}: {}", w + 1, game.table(w).bitstring()).unwrap();
    }
    out.push_str("end\n");
    out
}

struct Certificate {
    _kind: WitnessKind,
    edge: (usize, usize),
    matcher: usize,
    mismatcher: usize,
    tables: Vec<(usize, String)>,
}

fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "certificate")) => {}
        Some((no, _)) => return Err(Error::parse(no, "expected \"certificate\"")),
        None => return Err(Error::parse(1, "empty certificate")),
    }
    let vertex = |no: usize, tok: &str| -> Result<usize> {
        match tok.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Error::parse(no, format!("invalid vertex {tok:?}"))),
        }
    };
    let (mut kind, mut edge, mut matcher, mut mismatcher) = (None, None, None, None);
    let mut tables = Vec::new();
    let mut ended = false;
    for (no, line) in lines {
        if line == "end" {
            ended = true;
            break;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| Error::parse(no, format!("unexpected line {line:?}")))?;
        let value = value.trim();
        match key.trim() {
            "kind" => {
                kind = Some(match value {
                    "indifferent-matching-pennies" => WitnessKind::IndifferentMatchingPennies,
                    "isolated-matching-pennies" => WitnessKind::IsolatedMatchingPennies,
                    other => return Err(Error::parse(no, format!("unknown kind {other:?}"))),
                })
            }
            "edge" => {
                let mut it = value.split_whitespace();
                let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                    return Err(Error::parse(no, "edge needs two vertices"));
                };
                edge = Some((vertex(no, a)?, vertex(no, b)?));
            }
            "matcher" => matcher = Some(vertex(no, value)?),
            "mismatcher" => mismatcher = Some(vertex(no, value)?),
            k if k.starts_with("table ") => {
                tables.push((vertex(no, &k["table ".len()..])?, value.to_string()));
            }
            other => return Err(Error::parse(no, format!("unknown field {other:?}"))),
        }
    }
    if !ended {
        return Err(Error::parse(text.lines().count().max(1), "missing \"end\""));
    }
    let missing = |f: &str| Error::parse(text.lines().count().max(1), format!("missing field {f}"));
    Ok(Certificate {
        _kind: kind.ok_or_else(|| missing("kind"))?,
        edge: edge.ok_or_else(|| missing("edge"))?,
        matcher: matcher.ok_or_else(|| missing("matcher"))?,
        mismatcher: mismatcher.ok_or_else(|| missing("mismatcher"))?,
        tables,
    })
}

/// Re-checks a certificate against `game` from its own tables: the tables
/// must be the game's, and every row must carry the claimed stance.
pub fn verify_certificate(text: &str, game: &GraphicalGame) -> Result<bool> {
    let cert = parse_certificate(text)?;
    let g = game.graph();
    let (u, v) = cert.edge;
    if u >= g.n() || v >= g.n() || !g.has_edge(u, v) {
        return Ok(false);
    }
    let ends_ok = (cert.matcher == u && cert.mismatcher == v) || (cert.matcher == v && cert.mismatcher == u);
    if !ends_ok {
        return Ok(false);
    }
    let table_of = |w: usize| cert.tables.iter().find(|(x, _)| *x == w).map(|(_, s)| s.as_bytes());
    for (player, partner, flip) in [(cert.matcher, cert.mismatcher, 0u8), (cert.mismatcher, cert.matcher, 1u8)] {
        let Some(bits) = table_of(player) else {
            return Ok(false);
        };
        if bits != game.table(player).bitstring().as_bytes() {
            return Ok(false);
        }
        let pos = g.neighbors(player).iter().filter(|&&w| w < partner).count();
        let rows_ok = bits.iter().enumerate().all(|(r, &c)| c == b'0' + ((((r >> pos) & 1) as u8) ^ flip));
        if !rows_ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::sample_game;
    use crate::graph::{gen_complete, gen_empty, gen_path};

    fn mp_game(g: Graph, a: usize, b: usize) -> GraphicalGame {
        // a matches b, b mismatches a, everyone else constant 0
        GraphicalGame::from_fn(g.clone(), |v, r| {
            if v == a {
                let pos = g.neighbors(a).binary_search(&b).unwrap();
                (r >> pos) & 1 == 1
            } else if v == b {
                let pos = g.neighbors(b).binary_search(&a).unwrap();
                (r >> pos) & 1 == 0
            } else {
                false
            }
        })
        .unwrap()
    }

    #[test]
    fn isolated_edge_orientation() {
        let game = mp_game(gen_path(2), 0, 1);
        assert_eq!(is_indifferent_mp(&game, 0, 1).unwrap(), Some(Orientation { matcher: 0, mismatcher: 1 }));
        let game = mp_game(gen_path(2), 1, 0);
        assert_eq!(is_indifferent_mp(&game, 0, 1).unwrap(), Some(Orientation { matcher: 1, mismatcher: 0 }));
        let zero = GraphicalGame::from_fn(gen_path(2), |_, _| false).unwrap();
        assert_eq!(is_indifferent_mp(&zero, 0, 1).unwrap(), None);
        assert_eq!(is_indifferent_mp(&zero, 0, 0), Err(Error::EdgeAbsent(1, 1)));
    }

    #[test]
    fn planted_witness_is_found() {
        let g = gen_path(6);
        let game = mp_game(g, 3, 2);
        let w = find_witness(&game, 2).unwrap();
        assert_eq!(w.edge, (2, 3));
        assert_eq!(w.orientation, Orientation { matcher: 3, mismatcher: 2 });
        assert_eq!(w.kind, WitnessKind::IndifferentMatchingPennies);
        assert_eq!(w.checked_rows, 8);
        assert!(find_witness(&game, 1).is_none());
        assert!(find_witness(&sample_game(&gen_empty(4), 0).unwrap(), 3).is_none());
    }

    #[test]
    fn exposure_finds_isolated_edge_last() {
        // isolated vertices 0 and 1, then the MP edge (2,3); the loop runs
        // while at least half the vertices survive, so n = 4 is the largest
        // size at which the edge is still reached
        let g = gen_empty(2).disjoint_union(&gen_path(2));
        let game = mp_game(g, 2, 3);
        let trace = exposure_trace(&game);
        let examined: Vec<usize> = trace.steps.iter().map(|s| s.examined).collect();
        assert_eq!(examined, vec![0, 1, 2]);
        assert_eq!(trace.steps[2].tested, Some((2, 3)));
        let w = trace.witness.unwrap();
        assert_eq!(w.edge, (2, 3));
        assert_eq!(w.kind, WitnessKind::IsolatedMatchingPennies);

        let g = gen_empty(5).disjoint_union(&gen_path(2));
        assert!(exposure_search(&mp_game(g, 5, 6)).is_none());
    }

    #[test]
    fn exposure_on_complete_graph_stops_after_one_step() {
        let game = sample_game(&gen_complete(8), 1).unwrap();
        let trace = exposure_trace(&game);
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].removed.len(), 8);
        assert!(trace.witness.is_none());
    }

    #[test]
    fn exact_probabilities() {
        let f = |a, b| witness_probability_exact(a, b).unwrap();
        assert_eq!(f(1, 1), ExactFraction { numerator: 1, denominator: 8 });
        assert_eq!(f(1, 2), ExactFraction { numerator: 1, denominator: 32 });
        assert_eq!(f(2, 2), ExactFraction { numerator: 1, denominator: 128 });
        for a in 1..=4 {
            for b in 1..=4 {
                let want = 2f64.powi(1 - (1 << a) - (1 << b));
                assert_eq!(f(a, b).value(), want);
                let bound = edge_imp_probability_ln(a, b).exp();
                assert!(f(a, b).value() >= bound * (1.0 - 1e-12));
            }
        }
        assert_eq!(witness_probability_exact(5, 1), Err(Error::DegreeTooLarge(5, 1)));
        assert!(witness_probability_exact(0, 1).is_err());
    }

    #[test]
    fn bounds_single_edge_and_empty() {
        let b = nonexistence_probability_bound(&gen_path(2), 1);
        assert!((b.disjoint_bound - (1.0 - (-0.125f64).exp())).abs() < 1e-15);
        assert!((b.disjoint_bound - 0.11750).abs() < 1e-5);
        assert!((b.weighted_bound - 0.125).abs() < 1e-15);
        let e = nonexistence_probability_bound(&gen_empty(5), 2);
        assert_eq!((e.disjoint_bound, e.bounded_bound, e.weighted_bound), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bounds_long_path() {
        let n = 41;
        let b = nonexistence_probability_bound(&gen_path(n), 2);
        assert_eq!(b.disjoint_edges, n / 2);
        assert_eq!(b.bounded_edges, n - 1);
        let p = 8f64.powi(-4);
        assert!((b.disjoint_bound - (1.0 - (-(20.0) * p).exp())).abs() < 1e-15);
        assert!((b.bounded_bound - (1.0 - (-(40.0 / 4.0) * p).exp())).abs() < 1e-15);
    }

    #[test]
    fn certificates_verify() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let game = mp_game(g, 2, 1);
        let w = find_witness(&game, 2).unwrap();
        let text = write_certificate(&w, &game);
        assert!(text.contains("edge: 2 3"));
        assert!(verify_certificate(&text, &game).unwrap());

        // tamper with the claimed orientation
        let swapped = text.replace("matcher: 3", "matcher: X").replace("mismatcher: 2", "mismatcher: 3");
        let swapped = swapped.replace("matcher: X", "matcher: 2");
        assert!(!verify_certificate(&swapped, &game).unwrap());

        // same certificate against a different game
        let other = GraphicalGame::from_fn(game.graph().clone(), |_, _| false).unwrap();
        assert!(!verify_certificate(&text, &other).unwrap());

        assert!(verify_certificate("nonsense", &game).is_err());
        assert!(verify_certificate("certificate\nkind: x\nend\n", &game).is_err());
    }
}
