use super::Graph;

/// The κ-core: the largest induced subgraph with minimum degree at least κ.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreResult {
    pub kappa: usize,
    /// Surviving vertices, ascending.
    pub vertices: Vec<usize>,
    pub induced_edge_count: usize,
    /// Average degree `2|E|/|V|`, zero for the empty core.
    pub density: f64,
}

impl CoreResult {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Peels vertices of degree below `kappa` until none remain.
/// Parallel edges count toward degree.
pub fn kcore(g: &Graph, kappa: usize) -> CoreResult {
    let adj = g.adjacency();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; g.n()];
    let mut stack: Vec<usize> = (0..g.n()).filter(|&v| deg[v] < kappa).collect();
    for &v in &stack {
        removed[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if removed[w] {
                continue;
            }
            deg[w] -= 1;
            if deg[w] < kappa {
                removed[w] = true;
                stack.push(w);
            }
        }
    }
    let vertices: Vec<usize> = (0..g.n()).filter(|&v| !removed[v]).collect();
    let induced_edge_count = g
        .edges()
        .iter()
        .filter(|&&(u, v)| !removed[u] && !removed[v])
        .count();
    let density = if vertices.is_empty() {
        0.0
    } else {
        2.0 * induced_edge_count as f64 / vertices.len() as f64
    };
    CoreResult {
        kappa,
        vertices,
        induced_edge_count,
        density,
    }
}
