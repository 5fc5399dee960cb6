//! Plain-text graph format:
//!
//! ```text
//! # optional comments
//! 3
//! 1 2
//! 2 3
//! ```
//!
//! The first content line is `n`; every further line is an edge `u v`
//! with 1-based ends.

use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let lines = text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l))).filter(|(_, l)| !l.is_empty());
    parse_graph_lines(lines, text.lines().count())
}

/// Parses already comment-stripped, non-empty lines tagged with their
/// 1-based line numbers.
pub(crate) fn parse_graph_lines<'a, I>(mut lines: I, last_line: usize) -> Result<Graph>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (first, header) = lines.next().ok_or_else(|| Error::parse(last_line.max(1), "missing vertex count"))?;
    let n: usize =
        header.parse().map_err(|_| Error::parse(first, format!("expected vertex count, found {header:?}")))?;
    if n == 0 {
        return Err(Error::parse(first, "vertex count must be at least 1"));
    }

    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, line) in lines {
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::parse(line_no, format!("expected \"u v\", found {line:?}")));
        };
        let parse_end = |tok: &str| -> Result<usize> {
            let v: usize = tok.parse().map_err(|_| Error::parse(line_no, format!("invalid vertex {tok:?}")))?;
            if v == 0 || v > n {
                return Err(Error::parse(line_no, format!("vertex {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        let (u, v) = (parse_end(a)?, parse_end(b)?);
        if u == v {
            return Err(Error::parse(line_no, format!("self-loop at vertex {}", u + 1)));
        }
        let e = (u.min(v), u.max(v));
        if !seen.insert(e) {
            return Err(Error::parse(line_no, format!("duplicate edge ({}, {})", e.0 + 1, e.1 + 1)));
        }
        edges.push(e);
    }
    edges.sort_unstable();
    Ok(Graph::from_canonical(n, edges))
}

/// Canonical text: `n`, then edges in lexicographic order, 1-based.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{}", g.n()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{} {}", u + 1, v + 1).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_path;

    #[test]
    fn reads_path() {
        let g = read_graph("3\n1 2\n2 3\n").unwrap();
        assert_eq!(g, gen_path(3));
    }

    #[test]
    fn canonicalises() {
        let g = read_graph("# a triangle\n3\n\n3 2  # reversed\n1 2\n1 3\n").unwrap();
        assert_eq!(write_graph(&g), "3\n1 2\n1 3\n2 3\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(read_graph("2\n1 1\n"), Err(Error::parse(2, "self-loop at vertex 1")));
        let err = read_graph("3\n1 2\n# c\n2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        assert!(matches!(read_graph("3\n1 4\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_graph("3\n1 2 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_graph("x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_graph(""), Err(Error::Parse { .. })));
        assert!(matches!(read_graph("0\n"), Err(Error::Parse { line: 1, .. })));
    }
}
