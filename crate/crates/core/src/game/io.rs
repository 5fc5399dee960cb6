//! Game text format: the graph block, then one line per player
//!
//! ```text
//! 2
//! 1 2
//! 1: 01
//! 2: 10
//! ```
//!
//! where the bitstring lists the best reply of each row, row 0 first.

use std::fmt::Write as _;

use super::{check_degrees, BestResponseTable, GraphicalGame, Origin};
use crate::error::{Error, Result};
use crate::graph::{parse_graph_lines, strip_comment, write_graph};

pub fn write_game(game: &GraphicalGame) -> String {
    let mut out = write_graph(game.graph());
    for t in game.tables() {
        writeln!(out, "{}: {}", t.owner() + 1, t.bitstring()).unwrap();
    }
    out
}

pub fn read_game(text: &str) -> Result<GraphicalGame> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l))).filter(|(_, l)| !l.is_empty()).collect();
    let split = lines.iter().position(|(_, l)| l.contains(':')).unwrap_or(lines.len());
    let last_line = text.lines().count().max(1);
    let graph = parse_graph_lines(lines[..split].iter().copied(), last_line)?;
    check_degrees(&graph).map_err(|e| Error::parse(lines[0].0, e.to_string()))?;

    let n = graph.n();
    let mut tables: Vec<Option<BestResponseTable>> = vec![None; n];
    for &(line_no, line) in &lines[split..] {
        let (head, bits) =
            line.split_once(':').ok_or_else(|| Error::parse(line_no, "expected \"v: <bits>\" after the edge list"))?;
        let v: usize =
            head.trim().parse().map_err(|_| Error::parse(line_no, format!("invalid player {:?}", head.trim())))?;
        if v == 0 || v > n {
            return Err(Error::parse(line_no, format!("player {v} outside 1..={n}")));
        }
        let v = v - 1;
        if tables[v].is_some() {
            return Err(Error::parse(line_no, format!("second table for player {}", v + 1)));
        }
        let bits = bits.trim().as_bytes();
        let rows = 1usize << graph.degree(v);
        if bits.len() != rows {
            return Err(Error::parse(line_no, format!("player {} needs {rows} rows, found {}", v + 1, bits.len())));
        }
        if let Some(bad) = bits.iter().find(|&&b| b != b'0' && b != b'1') {
            return Err(Error::parse(line_no, format!("invalid table symbol {:?}", *bad as char)));
        }
        tables[v] = Some(BestResponseTable::from_fn(v, graph.neighbors(v).to_vec(), |r| bits[r] == b'1'));
    }

    let tables = tables
        .into_iter()
        .enumerate()
        .map(|(v, t)| t.ok_or_else(|| Error::parse(last_line, format!("missing table for player {}", v + 1))))
        .collect::<Result<Vec<_>>>()?;
    GraphicalGame::new(graph, tables, Origin::Explicit)
}
