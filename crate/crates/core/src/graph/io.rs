use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, Provenance};
use crate::error::{Error, Result};

/// Serializes as `n m` followed by one `u v` line per edge (`u < v`, sorted).
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 * (g.num_edges() + 1));
    let _ = writeln!(out, "{} {}", g.n(), g.num_edges());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edge_list(text: &str, provenance: Provenance) -> Result<Graph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let (n, m) = parse_pair(header, hline + 1)?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        let (u, v) = parse_pair(line, i + 1)?;
        if u >= n || v >= n {
            return Err(Error::Parse { line: i + 1, msg: format!("vertex out of range (n = {n})") });
        }
        if u == v {
            return Err(Error::Parse { line: i + 1, msg: format!("self-loop at {u}") });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline + 1,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges, provenance)
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, Provenance::File { path: path.display().to_string() })
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse { line: lineno, msg: "expected two integers".into() })?;
        tok.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("not a vertex index: `{tok}`") })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
    }
    Ok((a, b))
}
