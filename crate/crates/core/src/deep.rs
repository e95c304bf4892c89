//! `k`-deeply connected components.
//!
//! A vertex set is `k`-deeply connected when its induced subgraph holds `k`
//! edge-disjoint spanning trees. The maximal such sets partition the vertices.
//! An edge absent from a graph is dependent on it exactly when its endpoints
//! share a component, which is how [`components`] finds them: it builds a
//! maximal independent set and probes a parallel copy of every edge.

use crate::error::{Error, Result};
use crate::graph::{kcore, Edge, Graph};
use crate::matroid::{rank_of, ForestFamily};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeepPartition {
    pub k: usize,
    /// Component index per vertex, indexing `components`.
    pub component_id: Vec<usize>,
    /// Vertex sets, ascending inside, ordered by smallest vertex.
    pub components: Vec<Vec<usize>>,
}

impl DeepPartition {
    fn from_groups(k: usize, n: usize, components: Vec<Vec<usize>>) -> Self {
        let mut component_id = vec![0; n];
        for (c, vs) in components.iter().enumerate() {
            for &v in vs {
                component_id[v] = c;
            }
        }
        Self {
            k,
            component_id,
            components,
        }
    }

    /// Components with at least two vertices.
    pub fn nontrivial(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.components.iter().filter(|c| c.len() >= 2)
    }

    pub fn nontrivial_count(&self) -> usize {
        self.nontrivial().count()
    }

    /// Size of the largest non-trivial component, 0 if there is none.
    pub fn largest_nontrivial(&self) -> usize {
        self.nontrivial().map(Vec::len).max().unwrap_or(0)
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_id[u] == self.component_id[v]
    }
}

/// Partition of the vertices of `g` into `k`-deeply connected components.
pub fn components(g: &Graph, k: usize) -> Result<DeepPartition> {
    let mut fam = ForestFamily::new(g.n(), k)?;
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        fam.try_insert_tagged(u, v, id)?;
    }
    partition_from_family(&mut fam, g.edges())
}

/// Components of the graph whose edges are `edges`, given a family that
/// already holds a maximal independent subset of them.
pub(crate) fn partition_from_family(
    fam: &mut ForestFamily,
    edges: &[Edge],
) -> Result<DeepPartition> {
    for &(u, v) in edges {
        // A dependent probe records the tight set joining u and v.
        fam.is_independent(u, v)?;
    }
    let (k, n) = (fam.k(), fam.n());
    let groups = fam.tight_sets().groups();
    Ok(DeepPartition::from_groups(k, n, groups))
}

/// Whether `g` holds `k` edge-disjoint spanning trees.
pub fn is_k_deeply_connected(g: &Graph, k: usize) -> Result<bool> {
    if g.n() == 0 {
        return Err(Error::DegenerateInput("graph has no vertices".into()));
    }
    Ok(rank_of(g, k)? == k * (g.n() - 1))
}

/// Layering of a `k`-deeply connected graph: layer 0 is its `(k+1)`-core and
/// every vertex of layer `t >= 1` has exactly `k` edges into lower layers, at
/// least one of them into layer `t - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layers {
    pub layers: Vec<Vec<usize>>,
    pub layer_of: Vec<usize>,
    /// Per vertex, its edges into lower layers (empty on layer 0).
    pub down_edges: Vec<Vec<Edge>>,
}

impl Layers {
    /// Checks the layer conditions against `g`.
    pub fn verify(&self, g: &Graph, k: usize) -> std::result::Result<(), String> {
        let core = kcore(g, k + 1);
        let mut layer0 = self.layers.first().cloned().unwrap_or_default();
        layer0.sort_unstable();
        if layer0.is_empty() || layer0 != core.vertices {
            return Err("layer 0 is not the (k+1)-core".into());
        }
        for v in 0..g.n() {
            let t = self.layer_of[v];
            if t == 0 {
                continue;
            }
            let down: Vec<usize> = g
                .edges()
                .iter()
                .filter_map(|&(a, b)| match (a == v, b == v) {
                    (true, _) => Some(b),
                    (_, true) => Some(a),
                    _ => None,
                })
                .filter(|&w| self.layer_of[w] < t)
                .collect();
            if down.len() != k {
                return Err(format!(
                    "vertex {v} on layer {t} has {} down-edges",
                    down.len()
                ));
            }
            if !down.iter().any(|&w| self.layer_of[w] == t - 1) {
                return Err(format!(
                    "vertex {v} on layer {t} has no edge to layer {}",
                    t - 1
                ));
            }
            if self.down_edges[v].len() != k {
                return Err(format!("vertex {v}: recorded down-edges disagree"));
            }
        }
        Ok(())
    }
}

/// Peels degree-`k` vertices one at a time down to the `(k+1)`-core and
/// layers them in reverse peel order.
pub fn normal_representation(g: &Graph, k: usize) -> Result<Layers> {
    let n = g.n();
    if n < 2 || k < 2 {
        return Err(Error::DegenerateInput(format!(
            "normal representation needs n >= 2 and k >= 2 (got n = {n}, k = {k})"
        )));
    }
    if !is_k_deeply_connected(g, k)? {
        return Err(Error::NotDeeplyConnected { k });
    }

    let adj = g.adjacency();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::new();
    let mut down_edges = vec![Vec::new(); n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= k).collect();
    stack.reverse();
    while let Some(v) = stack.pop() {
        if removed[v] {
            continue;
        }
        debug_assert_eq!(deg[v], k, "a deeply connected graph keeps degree >= k");
        removed[v] = true;
        order.push(v);
        for &(w, _) in &adj[v] {
            if removed[w] {
                continue;
            }
            down_edges[v].push((v, w));
            deg[w] -= 1;
            if deg[w] == k {
                stack.push(w);
            }
        }
    }

    let mut layer_of = vec![0; n];
    for &v in order.iter().rev() {
        layer_of[v] = 1 + down_edges[v]
            .iter()
            .map(|&(_, w)| layer_of[w])
            .max()
            .unwrap_or(0);
    }
    let depth = layer_of.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth + 1];
    for v in 0..n {
        layers[layer_of[v]].push(v);
    }
    Ok(Layers {
        layers,
        layer_of,
        down_edges,
    })
}
