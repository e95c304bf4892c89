//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! n 4
//! 0 1 0.25
//! 1 2 0.5   # trailing comments are fine
//! ```
//!
//! The header `n <N>` comes first. Every edge line is `u v` or `u v w`; a file
//! is either fully weighted or fully unweighted.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{Graph, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    pub weights: Option<Vec<f64>>,
}

impl EdgeList {
    /// Weighted view; unweighted lists get unit weights.
    pub fn into_weighted(self) -> Result<WeightedGraph> {
        let m = self.graph.edge_count();
        let weights = self.weights.unwrap_or_else(|| vec![1.0; m]);
        WeightedGraph::new(self.graph, weights)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut weighted: Option<bool> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(vertex_count) = n else {
            match fields.as_slice() {
                ["n", count] => {
                    let count = count
                        .parse::<usize>()
                        .map_err(|_| parse_err(line_no, format!("bad vertex count {count:?}")))?;
                    n = Some(count);
                    continue;
                }
                _ => return Err(parse_err(line_no, "expected header `n <N>`")),
            }
        };
        let has_weight = match fields.len() {
            2 => false,
            3 => true,
            _ => return Err(parse_err(line_no, "expected `u v` or `u v w`")),
        };
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(parse_err(line_no, "mixed weighted and unweighted edges"));
        }
        let vertex = |s: &str| -> Result<usize> {
            let v = s
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad vertex id {s:?}")))?;
            if v >= vertex_count {
                return Err(parse_err(
                    line_no,
                    format!("vertex {v} out of range for n = {vertex_count}"),
                ));
            }
            Ok(v)
        };
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        if u == v {
            return Err(parse_err(line_no, format!("self-loop at vertex {u}")));
        }
        if has_weight {
            let w = fields[2]
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad weight {:?}", fields[2])))?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(parse_err(
                    line_no,
                    format!("weight {w} must be finite and non-negative"),
                ));
            }
            weights.push(w);
        }
        edges.push((u, v));
    }

    let n = n.ok_or_else(|| parse_err(0, "missing header `n <N>`"))?;
    let graph = Graph { n, edges };
    Ok(EdgeList {
        graph,
        weights: weighted.unwrap_or(false).then_some(weights),
    })
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

/// Writes `graph` in edge-list form. `weights`, when given, must align with
/// the edges.
pub fn write_edge_list<W: Write>(
    out: W,
    graph: &Graph,
    weights: Option<&[f64]>,
) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "n {}", graph.n())?;
    match weights {
        Some(ws) => {
            assert_eq!(
                ws.len(),
                graph.edge_count(),
                "weights must align with edges"
            );
            for (&(u, v), w) in graph.edges().iter().zip(ws) {
                writeln!(out, "{u} {v} {w}")?;
            }
        }
        None => {
            for &(u, v) in graph.edges() {
                writeln!(out, "{u} {v}")?;
            }
        }
    }
    out.flush()
}
