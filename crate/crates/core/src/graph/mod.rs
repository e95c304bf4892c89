//! Multigraphs on dense vertex ids, random-graph generators and core peeling.

mod edgelist;
mod generate;
mod kcore;

pub use edgelist::{parse_edge_list, read_edge_list, write_edge_list, EdgeList};
pub use generate::{gen_gnm, gen_gnp, gen_weighted_complete, pair_count, WeightDistribution};
pub(crate) use generate::{gnm_with, gnp_with, weighted_complete_with};
pub use kcore::{kcore, CoreResult};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

/// An undirected edge `(u, v)`. Orientation carries no meaning.
pub type Edge = (usize, usize);

/// Undirected multigraph on vertices `0..n`.
///
/// The edge sequence is ordered; its order is the insertion (process) order.
/// Parallel edges are allowed, self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, &e) in edges.iter().enumerate() {
            check_edge(n, e).map_err(|err| Error::invalid(format!("edge {i}: {err}")))?;
        }
        Ok(Self { n, edges })
    }

    /// Complete graph `K_n` with edges listed row by row.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(pair_count(n));
        for v in 1..n {
            for u in 0..v {
                edges.push((u, v));
            }
        }
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn push_edge(&mut self, u: usize, v: usize) -> Result<()> {
        check_edge(self.n, (u, v)).map_err(Error::invalid)?;
        self.edges.push((u, v));
        Ok(())
    }

    /// Graph on the first `m` edges of the sequence.
    pub fn prefix(&self, m: usize) -> Graph {
        Graph {
            n: self.n,
            edges: self.edges[..m.min(self.edges.len())].to_vec(),
        }
    }

    /// Same vertex set, edges selected by id.
    pub fn subgraph_by_edges(&self, ids: &[usize]) -> Graph {
        Graph {
            n: self.n,
            edges: ids.iter().map(|&i| self.edges[i]).collect(),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Per-vertex `(neighbour, edge id)` lists.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        adj
    }

    /// Subgraph induced by `vertices`, relabelled to `0..vertices.len()` in the
    /// given order. Returns the graph and, per new edge, the original edge id.
    pub fn induced(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        let mut ids = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                edges.push((local[u], local[v]));
                ids.push(id);
            }
        }
        (
            Graph {
                n: vertices.len(),
                edges,
            },
            ids,
        )
    }

    /// Ordinary connected components, each sorted, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut sets = DisjointSets::new(self.n);
        for &(u, v) in &self.edges {
            sets.union(u, v);
        }
        sets.groups()
    }
}

fn check_edge(n: usize, (u, v): Edge) -> std::result::Result<(), String> {
    if u >= n || v >= n {
        return Err(format!("endpoint out of range in ({u}, {v}) for n = {n}"));
    }
    if u == v {
        return Err(format!("self-loop at vertex {u}"));
    }
    Ok(())
}

/// A graph with a non-negative weight per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(Error::invalid(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edge_count()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::invalid(format!("edge {i} has weight {w}")));
        }
        Ok(Self { graph, weights })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Edge ids sorted by `(weight, id)`.
    pub fn order_by_weight(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.edge_count()).collect();
        ids.sort_by(|&a, &b| self.weights[a].total_cmp(&self.weights[b]).then(a.cmp(&b)));
        ids
    }

    /// Multiplies every weight by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.graph.clone(),
            self.weights.iter().map(|w| w * s).collect(),
        )
    }
}
