//! Plain-text edge lists.
//!
//! One edge per line as `src dst [weight]` with 0-based ids. Lines starting
//! with `#` are comments, except the directive `#n <N>` which fixes the node
//! count; without it the count is the largest id plus one.

use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;
use std::io::{BufRead, Write};

pub fn parse_edge_list(text: &str) -> Result<AdjacencyGraph> {
    read_edge_list(text.as_bytes())
}

pub fn read_edge_list(reader: impl BufRead) -> Result<AdjacencyGraph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("n") {
                let value = parts.next().ok_or_else(|| parse_err(lineno, "missing node count after #n"))?;
                let n = value.parse::<usize>().map_err(|e| parse_err(lineno, &format!("bad node count: {e}")))?;
                declared = Some(n);
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(lineno, "expected `src dst [weight]`"));
        }
        let src = parse_id(fields[0], lineno)?;
        let dst = parse_id(fields[1], lineno)?;
        let weight = match fields.get(2) {
            Some(w) => w.parse::<f64>().map_err(|e| parse_err(lineno, &format!("bad weight: {e}")))?,
            None => 1.0,
        };
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push((src, dst, weight));
    }
    let n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    AdjacencyGraph::weighted(n, edges)
}

fn parse_id(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>().map_err(|e| parse_err(line, &format!("bad node id `{s}`: {e}")))
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

/// Writes `#n <N>` followed by one edge per line; unit weights are omitted.
pub fn write_edge_list(graph: &AdjacencyGraph, mut out: impl Write) -> Result<()> {
    writeln!(out, "#n {}", graph.n())?;
    for &(s, d, w) in graph.edges() {
        if w == 1.0 {
            writeln!(out, "{s} {d}")?;
        } else {
            writeln!(out, "{s} {d} {w}")?;
        }
    }
    out.flush()?;
    Ok(())
}
