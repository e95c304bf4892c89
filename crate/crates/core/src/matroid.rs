//! The union of `k` graphic matroids, maintained as `k` edge-disjoint forests.
//!
//! An edge set is independent in the union matroid when it splits into `k`
//! forests, equivalently when no `m` vertices span more than `k(m-1)` of its
//! edges. [`ForestFamily`] keeps a maximal independent set of everything it
//! was offered. New edges go through a breadth-first augmenting search over
//! exchanges ("edge `g` may replace edge `h` in forest `i`") that either ends
//! in a forest where the moved edge closes no cycle, or exhausts a vertex set
//! on which every forest is already spanning.
//!
//! Such exhausted sets are *tight*: they carry exactly `k(|S|-1)` independent
//! edges. Tight sets only grow as edges are added, and two tight sets sharing
//! a vertex have a tight union, so the family records them in a union-find.
//! An edge with both ends in one recorded class is dependent without search;
//! every failed search merges at least two classes, so at most `n - 1`
//! searches fail over the lifetime of a family.

use std::collections::VecDeque;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

const NONE: usize = usize::MAX;

/// One edge moved between forests while inserting a new edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exchange {
    /// Tag of the moved member edge.
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The edge joined `forest` after the listed moves of existing members.
    Inserted { forest: usize, moves: Vec<Exchange> },
    /// The edge is spanned by the current members; nothing changed.
    /// [`ForestFamily::tight_class`] of either endpoint witnesses it.
    Dependent,
}

impl InsertOutcome {
    pub fn is_inserted(&self) -> bool {
        matches!(self, InsertOutcome::Inserted { .. })
    }
}

#[derive(Debug, Clone)]
struct Member {
    u: usize,
    v: usize,
    tag: usize,
    forest: usize,
}

/// A rooted spanning forest with per-vertex parent links.
#[derive(Debug, Clone)]
struct Forest {
    adj: Vec<Vec<(usize, usize)>>,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    depth: Vec<usize>,
    root: Vec<usize>,
    /// Tree size, indexed by root vertex.
    size: Vec<usize>,
    edges: usize,
}

impl Forest {
    fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            parent: vec![NONE; n],
            parent_edge: vec![NONE; n],
            depth: vec![0; n],
            root: (0..n).collect(),
            size: vec![1; n],
            edges: 0,
        }
    }

    fn connected(&self, a: usize, b: usize) -> bool {
        self.root[a] == self.root[b]
    }

    fn rebuild(&mut self) {
        let n = self.adj.len();
        self.parent.iter_mut().for_each(|p| *p = NONE);
        self.parent_edge.iter_mut().for_each(|p| *p = NONE);
        self.root.iter_mut().for_each(|r| *r = NONE);
        let mut queue = VecDeque::new();
        for s in 0..n {
            if self.root[s] != NONE {
                continue;
            }
            self.root[s] = s;
            self.depth[s] = 0;
            let mut count = 1;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for i in 0..self.adj[x].len() {
                    let (y, h) = self.adj[x][i];
                    if self.root[y] == NONE {
                        self.root[y] = s;
                        self.parent[y] = x;
                        self.parent_edge[y] = h;
                        self.depth[y] = self.depth[x] + 1;
                        count += 1;
                        queue.push_back(y);
                    }
                }
            }
            self.size[s] = count;
        }
    }

    /// Joins the trees of `a` and `b` by member `h`, re-rooting the smaller.
    fn link(&mut self, a: usize, b: usize, h: usize) {
        let (ra, rb) = (self.root[a], self.root[b]);
        debug_assert_ne!(ra, rb);
        let (small, big) = if self.size[ra] <= self.size[rb] {
            (a, b)
        } else {
            (b, a)
        };
        let big_root = self.root[big];
        let moved = self.size[self.root[small]];

        self.parent[small] = big;
        self.parent_edge[small] = h;
        self.depth[small] = self.depth[big] + 1;
        self.root[small] = big_root;
        let mut stack = vec![small];
        while let Some(x) = stack.pop() {
            for i in 0..self.adj[x].len() {
                let (y, e) = self.adj[x][i];
                if y == self.parent[x] && e == self.parent_edge[x] {
                    continue;
                }
                self.parent[y] = x;
                self.parent_edge[y] = e;
                self.depth[y] = self.depth[x] + 1;
                self.root[y] = big_root;
                stack.push(y);
            }
        }
        self.size[big_root] += moved;
        self.add_adj(a, b, h);
    }

    fn add_adj(&mut self, a: usize, b: usize, h: usize) {
        self.adj[a].push((b, h));
        self.adj[b].push((a, h));
        self.edges += 1;
    }

    fn remove_adj(&mut self, a: usize, b: usize, h: usize) {
        for x in [a, b] {
            let pos = self.adj[x]
                .iter()
                .position(|&(_, e)| e == h)
                .expect("member present in its forest");
            self.adj[x].swap_remove(pos);
        }
        self.edges -= 1;
    }
}

/// Union-find over one forest's vertices whose classes are the subtrees
/// formed by already-labelled edges. Reset lazily by generation stamps.
#[derive(Debug, Clone)]
struct LabelClusters {
    parent: Vec<usize>,
    top: Vec<usize>,
    stamp: Vec<u32>,
}

impl LabelClusters {
    fn new(n: usize) -> Self {
        Self {
            parent: vec![0; n],
            top: vec![0; n],
            stamp: vec![0; n],
        }
    }

    fn touch(&mut self, v: usize, generation: u32) {
        if self.stamp[v] != generation {
            self.stamp[v] = generation;
            self.parent[v] = v;
            self.top[v] = v;
        }
    }

    fn find(&mut self, mut v: usize, generation: u32) -> usize {
        self.touch(v, generation);
        while self.parent[v] != v {
            let p = self.parent[v];
            self.touch(p, generation);
            let gp = self.parent[p];
            self.parent[v] = gp;
            v = gp;
        }
        v
    }

    /// Merges the cluster of `child` into that of its tree parent `above`.
    fn absorb(&mut self, child: usize, above: usize, generation: u32) {
        let c = self.find(child, generation);
        let a = self.find(above, generation);
        let top = self.top[a];
        self.parent[c] = a;
        self.top[a] = top;
    }
}

enum SearchResult {
    /// Labelled chain ending in a member (or the new edge, `NONE`) that fits
    /// into `forest` without closing a cycle.
    Found { last: usize, forest: usize },
    /// Vertices covered by the exhausted search.
    Blocked(Vec<usize>),
}

/// `k` pairwise edge-disjoint forests over `0..n`.
#[derive(Debug, Clone)]
pub struct ForestFamily {
    n: usize,
    k: usize,
    members: Vec<Member>,
    forests: Vec<Forest>,
    tight: DisjointSets,
    // Search scratch.
    label_parent: Vec<usize>,
    label_stamp: Vec<u32>,
    clusters: Vec<LabelClusters>,
    generation: u32,
}

impl ForestFamily {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("tree multiplicity k must be at least 1"));
        }
        Ok(Self {
            n,
            k,
            members: Vec::new(),
            forests: (0..k).map(|_| Forest::new(n)).collect(),
            tight: DisjointSets::new(n),
            label_parent: Vec::new(),
            label_stamp: Vec::new(),
            clusters: (0..k).map(|_| LabelClusters::new(n)).collect(),
            generation: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Size of the maintained independent set, i.e. the rank of everything
    /// offered so far.
    pub fn rank(&self) -> usize {
        self.members.len()
    }

    /// Tags of all member edges, in insertion order.
    pub fn member_tags(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.tag).collect()
    }

    pub fn member_edges(&self) -> Vec<Edge> {
        self.members.iter().map(|m| (m.u, m.v)).collect()
    }

    /// Member tags per forest, each list ascending.
    pub fn extract_forests(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for m in &self.members {
            out[m.forest].push(m.tag);
        }
        out.iter_mut().for_each(|f| f.sort_unstable());
        out
    }

    /// Member endpoint pairs per forest.
    pub fn forest_edges(&self) -> Vec<Vec<Edge>> {
        let mut out = vec![Vec::new(); self.k];
        for m in &self.members {
            out[m.forest].push((m.u, m.v));
        }
        out
    }

    /// The known tight vertex set containing `v` (just `{v}` if none).
    ///
    /// Every vertex set returned carries exactly `k(|S|-1)` member edges, and
    /// after a [`InsertOutcome::Dependent`] verdict both endpoints lie in one.
    pub fn tight_class(&mut self, v: usize) -> Vec<usize> {
        let r = self.tight.find(v);
        (0..self.n).filter(|&x| self.tight.find(x) == r).collect()
    }

    pub(crate) fn tight_sets(&mut self) -> &mut DisjointSets {
        &mut self.tight
    }

    /// Inserts `(u, v)` if that keeps the member set independent.
    pub fn try_insert(&mut self, u: usize, v: usize) -> Result<InsertOutcome> {
        let tag = self.members.len();
        self.try_insert_tagged(u, v, tag)
    }

    /// As [`try_insert`](Self::try_insert), recording `tag` as the edge's
    /// identity in forests and exchange reports.
    pub fn try_insert_tagged(&mut self, u: usize, v: usize, tag: usize) -> Result<InsertOutcome> {
        self.check_endpoints(u, v)?;
        if self.tight.same(u, v) {
            return Ok(InsertOutcome::Dependent);
        }
        if let Some(i) = (0..self.k).find(|&i| !self.forests[i].connected(u, v)) {
            let id = self.push_member(u, v, tag, i);
            self.forests[i].link(u, v, id);
            return Ok(InsertOutcome::Inserted {
                forest: i,
                moves: Vec::new(),
            });
        }
        match self.search(u, v) {
            SearchResult::Blocked(cover) => {
                self.record_tight(&cover);
                Ok(InsertOutcome::Dependent)
            }
            SearchResult::Found { last, forest } => Ok(self.augment(u, v, tag, last, forest)),
        }
    }

    /// Whether `(u, v)` would be accepted, without inserting it.
    ///
    /// Only the record of tight sets may change.
    pub fn is_independent(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_endpoints(u, v)?;
        if self.tight.same(u, v) {
            return Ok(false);
        }
        if (0..self.k).any(|i| !self.forests[i].connected(u, v)) {
            return Ok(true);
        }
        match self.search(u, v) {
            SearchResult::Blocked(cover) => {
                self.record_tight(&cover);
                Ok(false)
            }
            SearchResult::Found { .. } => Ok(true),
        }
    }

    fn check_endpoints(&self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) out of range for n = {}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        Ok(())
    }

    fn push_member(&mut self, u: usize, v: usize, tag: usize, forest: usize) -> usize {
        self.members.push(Member { u, v, tag, forest });
        self.label_parent.push(NONE);
        self.label_stamp.push(0);
        self.members.len() - 1
    }

    fn record_tight(&mut self, cover: &[usize]) {
        if let Some((&first, rest)) = cover.split_first() {
            for &x in rest {
                self.tight.union(first, x);
            }
        }
    }

    fn next_generation(&mut self) -> u32 {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.label_stamp.iter_mut().for_each(|s| *s = 0);
            for c in &mut self.clusters {
                c.stamp.iter_mut().for_each(|s| *s = 0);
            }
            self.generation = 1;
        }
        self.generation
    }

    fn endpoints(&self, node: usize, new_edge: (usize, usize)) -> (usize, usize) {
        if node == NONE {
            new_edge
        } else {
            (self.members[node].u, self.members[node].v)
        }
    }

    /// Breadth-first exchange search from the new edge `(u, v)`. Each member
    /// is labelled at most once; tree paths skip already-labelled subtrees.
    fn search(&mut self, u: usize, v: usize) -> SearchResult {
        let generation = self.next_generation();
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(NONE);
        let mut labelled: Vec<usize> = Vec::new();
        let mut batch: Vec<usize> = Vec::new();

        while let Some(node) = queue.pop_front() {
            let (a, b) = self.endpoints(node, (u, v));
            let own = if node == NONE {
                NONE
            } else {
                self.members[node].forest
            };
            for i in 0..self.k {
                if i == own {
                    continue;
                }
                if !self.forests[i].connected(a, b) {
                    return SearchResult::Found {
                        last: node,
                        forest: i,
                    };
                }
                batch.clear();
                self.label_path(i, a, b, node, generation, &mut batch);
                batch.sort_unstable();
                for &h in &batch {
                    queue.push_back(h);
                    labelled.push(h);
                }
            }
        }

        let mut cover = vec![u, v];
        for &h in &labelled {
            cover.push(self.members[h].u);
            cover.push(self.members[h].v);
        }
        cover.sort_unstable();
        cover.dedup();
        SearchResult::Blocked(cover)
    }

    /// Labels every unlabelled edge on the tree path `a..b` of forest `i`
    /// with parent `node`, pushing the new labels into `out`.
    fn label_path(
        &mut self,
        i: usize,
        a: usize,
        b: usize,
        node: usize,
        generation: u32,
        out: &mut Vec<usize>,
    ) {
        let forest = &self.forests[i];
        let clusters = &mut self.clusters[i];
        loop {
            let ca = clusters.find(a, generation);
            let cb = clusters.find(b, generation);
            if ca == cb {
                return;
            }
            let (ta, tb) = (clusters.top[ca], clusters.top[cb]);
            let z = if forest.depth[ta] >= forest.depth[tb] {
                ta
            } else {
                tb
            };
            let h = forest.parent_edge[z];
            let above = forest.parent[z];
            debug_assert!(h != NONE, "climbed past a tree root");
            debug_assert_ne!(self.label_stamp[h], generation);
            self.label_stamp[h] = generation;
            self.label_parent[h] = node;
            clusters.absorb(z, above, generation);
            out.push(h);
        }
    }

    /// Applies the exchange chain ending at `last`, which moves into
    /// `final_forest`, and inserts the new edge.
    fn augment(
        &mut self,
        u: usize,
        v: usize,
        tag: usize,
        last: usize,
        final_forest: usize,
    ) -> InsertOutcome {
        // Chain from the new edge's first replacement to `last`.
        let mut chain = Vec::new();
        let mut x = last;
        while x != NONE {
            chain.push(x);
            x = self.label_parent[x];
        }
        chain.reverse();

        let mut moves = Vec::with_capacity(chain.len());
        let mut touched = vec![false; self.k];
        for (j, &h) in chain.iter().enumerate() {
            let from = self.members[h].forest;
            let to = chain
                .get(j + 1)
                .map_or(final_forest, |&next| self.members[next].forest);
            moves.push((h, from, to));
        }
        let new_forest = chain
            .first()
            .map_or(final_forest, |&h| self.members[h].forest);

        for &(h, from, _) in &moves {
            let (a, b) = (self.members[h].u, self.members[h].v);
            self.forests[from].remove_adj(a, b, h);
            touched[from] = true;
        }
        for &(h, _, to) in &moves {
            let (a, b) = (self.members[h].u, self.members[h].v);
            self.members[h].forest = to;
            self.forests[to].add_adj(a, b, h);
            touched[to] = true;
        }
        let id = self.push_member(u, v, tag, new_forest);
        self.forests[new_forest].add_adj(u, v, id);
        touched[new_forest] = true;
        for (i, forest) in self.forests.iter_mut().enumerate() {
            if touched[i] {
                forest.rebuild();
            }
        }

        InsertOutcome::Inserted {
            forest: new_forest,
            moves: moves
                .into_iter()
                .map(|(h, from, to)| Exchange {
                    edge: self.members[h].tag,
                    from,
                    to,
                })
                .collect(),
        }
    }

    /// Checks forest acyclicity, disjointness and parent-link consistency.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut total = 0;
        for (i, forest) in self.forests.iter().enumerate() {
            let mut sets = DisjointSets::new(self.n);
            let mut count = 0;
            for (id, m) in self.members.iter().enumerate() {
                if m.forest != i {
                    continue;
                }
                count += 1;
                if !sets.union(m.u, m.v) {
                    return Err(format!("forest {i} has a cycle through member {id}"));
                }
                if !forest.connected(m.u, m.v) {
                    return Err(format!("forest {i}: stale roots for member {id}"));
                }
            }
            if count != forest.edges {
                return Err(format!(
                    "forest {i}: edge count {} vs {count}",
                    forest.edges
                ));
            }
            for x in 0..self.n {
                let p = forest.parent[x];
                if p != NONE && forest.depth[x] != forest.depth[p] + 1 {
                    return Err(format!("forest {i}: bad depth at {x}"));
                }
                if (p == NONE) != (forest.root[x] == x) {
                    return Err(format!("forest {i}: bad root at {x}"));
                }
            }
            total += count;
        }
        if total != self.members.len() {
            return Err("forests do not partition the members".into());
        }
        Ok(())
    }
}

/// Rank of the edge set of `g` in the union of `k` graphic matroids.
pub fn rank_of(g: &Graph, k: usize) -> Result<usize> {
    let mut fam = ForestFamily::new(g.n(), k)?;
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        fam.try_insert_tagged(u, v, id)?;
    }
    Ok(fam.rank())
}

/// Largest edge limit accepted by [`brute_force_rank`].
pub const BRUTE_FORCE_EDGE_LIMIT: usize = 20;
/// Largest number of non-isolated vertices accepted by [`brute_force_rank`].
pub const BRUTE_FORCE_VERTEX_LIMIT: usize = 16;

/// Rank by exhaustion: the largest edge subset in which no `m` vertices span
/// more than `k(m-1)` edges, checked over every vertex subset.
pub fn brute_force_rank(g: &Graph, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::invalid("tree multiplicity k must be at least 1"));
    }
    let m = g.edge_count();
    if m > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::InstanceTooLarge {
            actual: m,
            limit: BRUTE_FORCE_EDGE_LIMIT,
        });
    }
    let masks = vertex_subset_masks(g)?;
    let mut best = 0;
    for subset in 0u32..(1u32 << m) {
        let size = subset.count_ones() as usize;
        if size > best && is_sparse(subset, &masks, k) {
            best = size;
        }
    }
    Ok(best)
}

/// For every vertex subset of size at least two over the non-isolated
/// vertices: (subset size, mask of edges inside it).
pub(crate) fn vertex_subset_masks(g: &Graph) -> Result<Vec<(usize, u32)>> {
    let mut used: Vec<usize> = g.edges().iter().flat_map(|&(u, v)| [u, v]).collect();
    used.sort_unstable();
    used.dedup();
    if used.len() > BRUTE_FORCE_VERTEX_LIMIT {
        return Err(Error::InstanceTooLarge {
            actual: used.len(),
            limit: BRUTE_FORCE_VERTEX_LIMIT,
        });
    }
    let local = |x: usize| used.binary_search(&x).expect("used vertex");
    let edge_bits: Vec<u32> = g
        .edges()
        .iter()
        .map(|&(u, v)| (1u32 << local(u)) | (1u32 << local(v)))
        .collect();
    let mut masks = Vec::new();
    for vs in 0u32..(1u32 << used.len()) {
        let size = vs.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let inside = edge_bits
            .iter()
            .enumerate()
            .filter(|(_, &bits)| bits & vs == bits)
            .fold(0u32, |acc, (i, _)| acc | (1 << i));
        masks.push((size, inside));
    }
    Ok(masks)
}

pub(crate) fn is_sparse(subset: u32, masks: &[(usize, u32)], k: usize) -> bool {
    masks
        .iter()
        .all(|&(size, inside)| ((subset & inside).count_ones() as usize) <= k * (size - 1))
}
