//! Generalized Kruskal: the lightest union of `k` edge-disjoint spanning
//! trees, and the random graph process viewed through the same structure.

use rand::Rng;

use crate::deep::partition_from_family;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{kcore, pair_count, WeightedGraph};
use crate::matroid::ForestFamily;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub k: usize,
    /// Accepted edge ids in acceptance (ascending weight) order.
    pub chosen_edges: Vec<usize>,
    /// Sum of chosen weights, accumulated in acceptance order.
    pub total_weight: f64,
    /// Edge ids per forest, each ascending.
    pub forests: Vec<Vec<usize>>,
    /// Whether `k(n-1)` edges were found, i.e. `k` spanning trees exist.
    pub feasible: bool,
}

/// Scans edges by `(weight, id)` and keeps each one that stays independent
/// in the union matroid, stopping once `k(n-1)` are kept.
///
/// An infeasible graph yields the lightest maximal independent set found.
pub fn min_weight_union(wg: &WeightedGraph, k: usize) -> Result<Solution> {
    let n = wg.n();
    let mut fam = ForestFamily::new(n, k)?;
    let target = k * n.saturating_sub(1);
    let mut chosen = Vec::with_capacity(target);
    let mut total = 0.0;
    let edges = wg.graph().edges();
    if target > 0 {
        for id in wg.order_by_weight() {
            let (u, v) = edges[id];
            if fam.try_insert_tagged(u, v, id)?.is_inserted() {
                chosen.push(id);
                total += wg.weights()[id];
                if chosen.len() == target {
                    break;
                }
            }
        }
    }
    Ok(Solution {
        k,
        feasible: chosen.len() == target,
        chosen_edges: chosen,
        total_weight: total,
        forests: fam.extract_forests(),
    })
}

/// Largest edge count accepted by [`brute_force_min_union`].
pub const BRUTE_FORCE_UNION_EDGE_LIMIT: usize = 16;

/// Exhaustive minimum over all `k(n-1)`-edge subsets that split into `k`
/// spanning trees. `None` when no such subset exists.
///
/// Weights of a subset are summed in `(weight, id)` order, matching
/// [`min_weight_union`].
pub fn brute_force_min_union(wg: &WeightedGraph, k: usize) -> Result<Option<f64>> {
    if k == 0 {
        return Err(Error::invalid("tree multiplicity k must be at least 1"));
    }
    let m = wg.edge_count();
    if m > BRUTE_FORCE_UNION_EDGE_LIMIT {
        return Err(Error::InstanceTooLarge {
            actual: m,
            limit: BRUTE_FORCE_UNION_EDGE_LIMIT,
        });
    }
    let n = wg.n();
    let target = k * n.saturating_sub(1);
    if target == 0 {
        return Ok(Some(0.0));
    }
    if target > m {
        return Ok(None);
    }
    let order = wg.order_by_weight();
    let edges = wg.graph().edges();
    let mut best: Option<f64> = None;
    for subset in 0u32..(1u32 << m) {
        if subset.count_ones() as usize != target {
            continue;
        }
        let weight: f64 = order
            .iter()
            .filter(|&&id| subset & (1 << id) != 0)
            .map(|&id| wg.weights()[id])
            .sum();
        if best.is_some_and(|b| weight >= b) {
            continue;
        }
        let picked: Vec<(usize, usize)> = (0..m)
            .filter(|&id| subset & (1 << id) != 0)
            .map(|id| edges[id])
            .collect();
        if split_into_spanning_trees(n, k, &picked) {
            best = Some(weight);
        }
    }
    Ok(best)
}

/// Backtracking search for an assignment of `edges` to `k` forests.
/// With `k(n-1)` edges, any such assignment is `k` spanning trees.
fn split_into_spanning_trees(n: usize, k: usize, edges: &[(usize, usize)]) -> bool {
    fn assign(
        i: usize,
        edges: &[(usize, usize)],
        labels: &mut Vec<Vec<usize>>,
        used: usize,
    ) -> bool {
        let Some(&(u, v)) = edges.get(i) else {
            return true;
        };
        let k = labels.len();
        for f in 0..k.min(used + 1) {
            let (lu, lv) = (labels[f][u], labels[f][v]);
            if lu == lv {
                continue;
            }
            let saved = labels[f].clone();
            for l in labels[f].iter_mut() {
                if *l == lv {
                    *l = lu;
                }
            }
            if assign(i + 1, edges, labels, used.max(f + 1)) {
                return true;
            }
            labels[f] = saved;
        }
        false
    }
    let mut labels = vec![(0..n).collect::<Vec<usize>>(); k];
    assign(0, edges, &mut labels, 0)
}

/// Checks that `solution` is `k` edge-disjoint spanning trees of `wg`.
pub fn verify_solution(wg: &WeightedGraph, solution: &Solution) -> std::result::Result<(), String> {
    let n = wg.n();
    let k = solution.k;
    let mut seen = vec![false; wg.edge_count()];
    let mut weight = 0.0;
    for forest in &solution.forests {
        let mut sets = DisjointSets::new(n);
        for &id in forest {
            if std::mem::replace(&mut seen[id], true) {
                return Err(format!("edge {id} used twice"));
            }
            let (u, v) = wg.graph().edges()[id];
            if !sets.union(u, v) {
                return Err(format!("edge {id} closes a cycle"));
            }
            weight += wg.weights()[id];
        }
        if solution.feasible && forest.len() + 1 != n.max(1) {
            return Err(format!(
                "forest with {} edges does not span {n} vertices",
                forest.len()
            ));
        }
    }
    let count: usize = solution.forests.iter().map(Vec::len).sum();
    if count != solution.chosen_edges.len() {
        return Err("forests and chosen edges disagree".into());
    }
    if solution.feasible && count != k * n.saturating_sub(1) {
        return Err("feasible solution has the wrong size".into());
    }
    let tolerance = 1e-9 * weight.abs().max(1.0);
    if (weight - solution.total_weight).abs() > tolerance {
        return Err(format!(
            "total weight {} vs recomputed {weight}",
            solution.total_weight
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    pub m: usize,
    pub rank: usize,
    /// 0 when there is no component with two or more vertices.
    pub largest_nontrivial_component: usize,
    pub nontrivial_component_count: usize,
    /// Size and edge count of the `(k+1)`-core.
    pub core_size: usize,
    pub core_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessTrace {
    pub n: usize,
    pub k: usize,
    pub checkpoints: Vec<Checkpoint>,
    /// Rank increment (0 or 1) of every inserted edge, in process order.
    pub increments: Vec<u8>,
}

/// Adds the edges of a random permutation of `K_n` one at a time, recording
/// rank, deep components and the `(k+1)`-core at each checkpoint.
pub fn run_process(n: usize, k: usize, checkpoints: &[usize], seed: u64) -> Result<ProcessTrace> {
    let mut rng = rng_from_seed(seed);
    run_process_with(n, k, checkpoints, &mut rng)
}

pub(crate) fn run_process_with<R: Rng>(
    n: usize,
    k: usize,
    checkpoints: &[usize],
    rng: &mut R,
) -> Result<ProcessTrace> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("checkpoints must be sorted ascending"));
    }
    let total = pair_count(n);
    let last = checkpoints.last().copied().unwrap_or(0);
    if last > total {
        return Err(Error::invalid(format!(
            "checkpoint {last} exceeds the {total} vertex pairs of n = {n}"
        )));
    }
    let process = crate::graph::gnm_with(n, last, rng);
    let mut fam = ForestFamily::new(n, k)?;
    let mut increments = Vec::with_capacity(last);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut inserted = 0;
    for &m in checkpoints {
        while inserted < m {
            let (u, v) = process.edges()[inserted];
            increments.push(fam.try_insert_tagged(u, v, inserted)?.is_inserted() as u8);
            inserted += 1;
        }
        let prefix = &process.edges()[..m];
        let partition = partition_from_family(&mut fam, prefix)?;
        let core = kcore(&process.prefix(m), k + 1);
        out.push(Checkpoint {
            m,
            rank: fam.rank(),
            largest_nontrivial_component: partition.largest_nontrivial(),
            nontrivial_component_count: partition.nontrivial_count(),
            core_size: core.size(),
            core_edges: core.induced_edge_count,
        });
    }
    Ok(ProcessTrace {
        n,
        k,
        checkpoints: out,
        increments,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::Rng;

    use super::*;
    use crate::graph::Graph;

    fn weighted(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        let g = Graph::new(n, edges.iter().map(|&(u, v, _)| (u, v)).collect()).unwrap();
        WeightedGraph::new(g, edges.iter().map(|&(_, _, w)| w).collect()).unwrap()
    }

    #[test]
    fn triangle_mst() {
        let wg = weighted(3, &[(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0)]);
        let s = min_weight_union(&wg, 1).unwrap();
        assert!(s.feasible);
        assert_eq!(s.chosen_edges, vec![0, 1]);
        assert_eq!(s.total_weight, 3.0);
        assert_eq!(brute_force_min_union(&wg, 1).unwrap(), Some(3.0));
    }

    #[test]
    fn k4_two_trees() {
        let unit = WeightedGraph::new(Graph::complete(4), vec![1.0; 6]).unwrap();
        let s = min_weight_union(&unit, 2).unwrap();
        assert!(s.feasible);
        assert_eq!(s.chosen_edges.len(), 6);
        assert_eq!(s.total_weight, 6.0);
        assert_eq!(brute_force_min_union(&unit, 2).unwrap(), Some(6.0));
        verify_solution(&unit, &s).unwrap();

        let heavy =
            WeightedGraph::new(Graph::complete(4), vec![1.0, 1.0, 1.0, 1.0, 1.0, 10.0]).unwrap();
        let s = min_weight_union(&heavy, 2).unwrap();
        assert_eq!(s.total_weight, 15.0);
        assert_eq!(s.chosen_edges.len(), 6);
    }

    #[test]
    fn infeasible_instances() {
        let k3 = WeightedGraph::new(Graph::complete(3), vec![1.0, 2.0, 3.0]).unwrap();
        let s = min_weight_union(&k3, 2).unwrap();
        assert!(!s.feasible);
        assert_eq!(s.chosen_edges.len(), 3);
        verify_solution(&k3, &s).unwrap();

        let k4_minus = WeightedGraph::new(Graph::complete(4).prefix(5), vec![1.0; 5]).unwrap();
        assert_eq!(brute_force_min_union(&k4_minus, 2).unwrap(), None);
        assert!(!min_weight_union(&k4_minus, 2).unwrap().feasible);
    }

    #[test]
    fn single_vertex_is_trivially_feasible() {
        let wg = WeightedGraph::new(Graph::empty(1), vec![]).unwrap();
        let s = min_weight_union(&wg, 3).unwrap();
        assert!(s.feasible);
        assert_eq!(s.total_weight, 0.0);
    }

    #[test]
    fn brute_force_guards_size() {
        let wg = WeightedGraph::new(Graph::complete(7), vec![1.0; 21]).unwrap();
        assert!(matches!(
            brute_force_min_union(&wg, 2),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn greedy_matches_exhaustive_minimum() {
        let mut rng = rng_from_seed(2024);
        let mut feasible_seen = 0;
        for trial in 0..120 {
            let n = rng.gen_range(2..=6);
            let m = rng.gen_range(1..=14.min(pair_count(n) + 4));
            let k = rng.gen_range(1..=3);
            let mut edges = Vec::new();
            while edges.len() < m {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if u != v {
                    // Small integer weights force ties and keep sums exact.
                    let w = if trial % 2 == 0 {
                        rng.gen_range(0..5) as f64
                    } else {
                        rng.gen()
                    };
                    edges.push((u, v, w));
                }
            }
            let wg = weighted(n, &edges);
            let s = min_weight_union(&wg, k).unwrap();
            verify_solution(&wg, &s).unwrap();
            match brute_force_min_union(&wg, k).unwrap() {
                Some(best) => {
                    feasible_seen += 1;
                    assert!(s.feasible);
                    assert_eq!(s.total_weight, best, "trial {trial}");
                }
                None => assert!(!s.feasible),
            }
        }
        assert!(feasible_seen > 20);
    }

    #[test]
    fn process_checkpoint_edge_cases() {
        let t = run_process(10, 2, &[0], 1).unwrap();
        assert_eq!(
            t.checkpoints[0],
            Checkpoint {
                m: 0,
                rank: 0,
                largest_nontrivial_component: 0,
                nontrivial_component_count: 0,
                core_size: 0,
                core_edges: 0
            }
        );
        let n = 12;
        let t = run_process(n, 1, &[pair_count(n)], 1).unwrap();
        assert_eq!(t.checkpoints[0].rank, n - 1);
        assert_eq!(t.checkpoints[0].largest_nontrivial_component, n);
        assert_eq!(t.checkpoints[0].nontrivial_component_count, 1);
        assert!(run_process(n, 1, &[5, 3], 1).is_err());
        assert!(run_process(n, 1, &[pair_count(n) + 1], 1).is_err());
    }

    #[test]
    fn process_trace_is_monotone() {
        let checkpoints: Vec<usize> = (0..=10).map(|i| i * 40).collect();
        let t = run_process(80, 2, &checkpoints, 9).unwrap();
        for w in t.checkpoints.windows(2) {
            assert!(w[0].rank <= w[1].rank);
            assert!(w[0].core_size <= w[1].core_size);
        }
        assert!(t.increments.iter().all(|&x| x <= 1));
        let total: usize = t.increments.iter().map(|&x| x as usize).sum();
        assert_eq!(total, t.checkpoints.last().unwrap().rank);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn scaling_weights_scales_the_optimum(seed in any::<u64>(), k in 1usize..4, exp in -4i32..5) {
            let mut rng = rng_from_seed(seed);
            let n = 8;
            let wg = WeightedGraph::new(
                Graph::complete(n),
                (0..pair_count(n)).map(|_| rng.gen::<f64>()).collect(),
            ).unwrap();
            let s = 2f64.powi(exp);
            let base = min_weight_union(&wg, k).unwrap();
            let scaled = min_weight_union(&wg.scaled(s).unwrap(), k).unwrap();
            prop_assert_eq!(&base.chosen_edges, &scaled.chosen_edges);
            prop_assert_eq!(base.total_weight * s, scaled.total_weight);
        }
    }
}
