//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line even when captured output is hidden; exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use kforest::analytic::{self, pois_tail, SolverConfig, ZETA_3};
use kforest::deep::{components, normal_representation};
use kforest::experiment::{
    run_experiment, ExperimentConfig, ExperimentKind, ExperimentRecord, Metric, RowKind,
};
use kforest::graph::{gen_gnm, kcore, Graph, WeightedGraph};
use kforest::ktrees::{brute_force_min_union, min_weight_union, run_process};
use kforest::matroid::{brute_force_rank, rank_of};
use kforest::rng::rng_from_seed;
use rand::seq::SliceRandom;
use rand::Rng;

/// Value of the `k = 2` limit constant known from earlier work on two
/// disjoint spanning trees.
const K2_REFERENCE: f64 = 4.1704288;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_multigraph<R: Rng>(rng: &mut R, n: usize, m: usize) -> Graph {
    let mut g = Graph::empty(n);
    while g.edge_count() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            g.push_edge(u, v).unwrap();
        }
    }
    g
}

fn summary(records: &[ExperimentRecord], metric: Metric, degree: Option<f64>) -> &ExperimentRecord {
    records
        .iter()
        .find(|r| r.row == RowKind::Summary && r.metric == metric && r.degree == degree)
        .expect("summary row present")
}

fn trial_values(records: &[ExperimentRecord], metric: Metric, degree: f64) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.row == RowKind::Trial && r.metric == metric && r.degree == Some(degree))
        .map(|r| r.empirical.unwrap())
        .collect()
}

fn rank_oracle() -> Check {
    let mut rng = rng_from_seed(1);
    let mut mismatches = 0;
    let total = 600;
    for i in 0..total {
        let n = rng.gen_range(2..=7);
        let m = rng.gen_range(0..=12);
        let k = 1 + i % 3;
        let g = random_multigraph(&mut rng, n, m);
        if rank_of(&g, k).unwrap() != brute_force_rank(&g, k).unwrap() {
            mismatches += 1;
        }
    }
    ensure(
        mismatches == 0,
        format!("{total} graphs, {mismatches} mismatches"),
    )
}

fn optimum_oracle() -> Check {
    let mut rng = rng_from_seed(2);
    let (mut compared, mut mismatches, mut feasible) = (0, 0, 0);
    while compared < 240 {
        let k = 1 + compared % 3;
        let n = rng.gen_range(2..=if k == 3 { 5 } else { 6 });
        let m = rng.gen_range(k * (n - 1)..=14);
        let g = random_multigraph(&mut rng, n, m);
        // Small integers force ties; otherwise continuous weights.
        let weights: Vec<f64> = (0..m)
            .map(|_| {
                if compared % 2 == 0 {
                    rng.gen_range(0..4) as f64
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        let wg = WeightedGraph::new(g, weights).unwrap();
        let greedy = min_weight_union(&wg, k).unwrap();
        let brute = brute_force_min_union(&wg, k).unwrap();
        let agree = match brute {
            Some(w) => {
                feasible += 1;
                greedy.feasible && greedy.total_weight == w
            }
            None => !greedy.feasible,
        };
        mismatches += !agree as usize;
        compared += 1;
    }
    ensure(
        mismatches == 0 && feasible >= 200,
        format!("{compared} instances ({feasible} feasible), {mismatches} mismatches"),
    )
}

fn weight_mean(n: usize, k: usize, seed: u64) -> (f64, f64) {
    let cfg = ExperimentConfig::new(ExperimentKind::Weight, n, k, 20, seed);
    let recs = run_experiment(&cfg).unwrap();
    let s = summary(&recs, Metric::TotalWeight, None);
    (s.empirical.unwrap(), s.std.unwrap())
}

fn mst_constant() -> Check {
    let (mean, std) = weight_mean(1000, 1, 3);
    let rel = (mean - ZETA_3).abs() / ZETA_3;
    ensure(
        rel < 0.05,
        format!("mean {mean:.5} (std {std:.4}) vs {ZETA_3:.7}, rel error {rel:.4}"),
    )
}

fn limit_weights() -> Check {
    let cfg = SolverConfig::default();
    let w2 = analytic::limit_weight(2, 1.0, &cfg).unwrap();
    let w3 = analytic::limit_weight(3, 1.0, &cfg).unwrap();
    let reference_gap = (w2 - K2_REFERENCE).abs();
    let (m2, _) = weight_mean(2000, 2, 4);
    let (m3, _) = weight_mean(2000, 3, 5);
    let r2 = (m2 - w2).abs() / w2;
    let r3 = (m3 - w3).abs() / w3;
    ensure(
        r2 < 0.05 && r3 < 0.05 && reference_gap < 1e-6,
        format!(
            "k=2 mean {m2:.4} vs {w2:.7} (rel {r2:.4}, reference gap {reference_gap:.1e}); k=3 mean {m3:.4} vs {w3:.7} (rel {r3:.4})"
        ),
    )
}

fn rank_density() -> Check {
    let cfg = SolverConfig::default();
    let ds = analytic::deep_threshold(2, &cfg).unwrap();
    let grid = vec![ds - 1.0, ds + 1.0, ds + 3.0];
    let exp =
        ExperimentConfig::new(ExperimentKind::Rank, 3000, 2, 10, 6).with_degrees(grid.clone());
    let recs = run_experiment(&exp).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &d in &grid {
        let s = summary(&recs, Metric::RankDensity, Some(d));
        let rel = s.rel_error.unwrap();
        ok &= rel < 0.02;
        if d < ds {
            let worst = trial_values(&recs, Metric::RankDensity, d)
                .iter()
                .map(|r| (r - d / 2.0).abs() / (d / 2.0))
                .fold(0.0, f64::max);
            ok &= worst < 0.01;
            parts.push(format!("d={d:.3}: rel {rel:.4}, worst vs d/2 {worst:.4}"));
        } else {
            parts.push(format!("d={d:.3}: rel {rel:.4}"));
        }
    }
    ensure(ok, parts.join("; "))
}

fn structure() -> Check {
    let cfg = SolverConfig::default();
    let ds = analytic::deep_threshold(2, &cfg).unwrap();
    let (below, above) = (ds - 1.0, ds + 1.0);
    let exp = ExperimentConfig::new(ExperimentKind::Structure, 3000, 2, 10, 7)
        .with_degrees(vec![below, above]);
    let recs = run_experiment(&exp).unwrap();
    let zero_below = trial_values(&recs, Metric::NontrivialCount, below)
        .iter()
        .filter(|&&c| c == 0.0)
        .count();
    let target = analytic::beta(2, above, &cfg).unwrap() * 3000.0;
    let counts = trial_values(&recs, Metric::NontrivialCount, above);
    let sizes = trial_values(&recs, Metric::LargestComponent, above);
    let good_above = counts
        .iter()
        .zip(&sizes)
        .filter(|(&c, &s)| c == 1.0 && (s - target).abs() / target < 0.05)
        .count();
    ensure(
        zero_below >= 9 && good_above >= 9,
        format!(
            "d={below:.3}: {zero_below}/10 without components; d={above:.3}: {good_above}/10 with one component within 5% of {target:.1}"
        ),
    )
}

fn core_laws() -> Check {
    let cfg = SolverConfig::default();
    let (g3, _) = analytic::gamma_threshold(3, &cfg).unwrap();
    let (below, above) = (g3 - 0.5, g3 + 1.0);
    let exp = ExperimentConfig::new(ExperimentKind::Core, 3000, 2, 10, 8)
        .with_degrees(vec![below, above]);
    let recs = run_experiment(&exp).unwrap();
    let empty = trial_values(&recs, Metric::CoreFraction, below)
        .iter()
        .filter(|&&f| f == 0.0)
        .count();
    let size_rel = summary(&recs, Metric::CoreFraction, Some(above))
        .rel_error
        .unwrap();
    let density_rel = summary(&recs, Metric::CoreDensity, Some(above))
        .rel_error
        .unwrap();
    ensure(
        empty >= 9 && size_rel < 0.03 && density_rel < 0.03,
        format!("d={below:.3}: {empty}/10 empty; d={above:.3}: size rel {size_rel:.4}, density rel {density_rel:.4}"),
    )
}

fn analytic_consistency() -> Check {
    let cfg = SolverConfig::default();
    let mut worst_lambda: f64 = 0.0;
    let mut worst_beta: f64 = 0.0;
    for k in 2..=3 {
        let ds = analytic::deep_threshold(k, &cfg).unwrap();
        for i in 0..50 {
            let d = ds + 1e-3 + 0.4 * i as f64;
            let l = analytic::lambda_root(k + 1, d, &cfg).unwrap();
            worst_lambda = worst_lambda.max((l - d * pois_tail(k, l).unwrap()).abs());
            let b = analytic::beta(k, d, &cfg).unwrap();
            worst_beta = worst_beta.max((b - pois_tail(k, b * d).unwrap()).abs());
        }
    }

    // d r / d c = 1 - β(2c)^2, checked on both sides of the threshold.
    let ds = analytic::deep_threshold(2, &cfg).unwrap();
    let h = 1e-4;
    let mut worst_deriv: f64 = 0.0;
    for &d in &[
        1.0,
        2.0,
        2.8,
        ds - 0.3,
        ds + 0.3,
        ds + 1.0,
        ds + 2.0,
        7.0,
        9.0,
        12.0,
    ] {
        let r = |x: f64| analytic::rank_density(2, x, &cfg).unwrap();
        let fd = (r(d + 2.0 * h) - r(d - 2.0 * h)) / (2.0 * h);
        let b = analytic::beta(2, d, &cfg).unwrap();
        worst_deriv = worst_deriv.max((fd - (1.0 - b * b)).abs());
    }

    let zeta_gap = (analytic::limit_weight(1, 1.0, &cfg).unwrap() - ZETA_3).abs();
    let mut scaling_exact = true;
    for k in 1..=4 {
        for &a in &[0.5, 1.0, 3.0] {
            let w = analytic::limit_weight(k, a, &cfg).unwrap();
            let w2 = analytic::limit_weight(k, 2.0 * a, &cfg).unwrap();
            scaling_exact &= w2 == w / 2.0;
        }
    }
    ensure(
        worst_lambda <= 1e-10 && worst_beta <= 1e-10 && worst_deriv <= 1e-5 && zeta_gap <= 1e-4 && scaling_exact,
        format!(
            "lambda residual {worst_lambda:.1e}, beta residual {worst_beta:.1e}, derivative gap {worst_deriv:.1e}, zeta(3) gap {zeta_gap:.1e}, scaling exact {scaling_exact}"
        ),
    )
}

fn invariants() -> Check {
    let mut rng = rng_from_seed(9);
    let mut failures = Vec::new();

    // Submodularity of the union-matroid rank on random edge subsets.
    for t in 0..200 {
        let n = rng.gen_range(4..=12);
        let m = rng.gen_range(n..=3 * n);
        let g = random_multigraph(&mut rng, n, m);
        let k = 1 + t % 3;
        let a: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
        let b: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
        let union: Vec<usize> = (0..m).filter(|i| a.contains(i) || b.contains(i)).collect();
        let inter: Vec<usize> = (0..m).filter(|i| a.contains(i) && b.contains(i)).collect();
        let r = |ids: &[usize]| rank_of(&g.subgraph_by_edges(ids), k).unwrap();
        if r(&a) + r(&b) < r(&union) + r(&inter) {
            failures.push(format!("submodularity, trial {t}"));
        }
    }

    // Deep components refine: k+1 inside k, and earlier prefixes inside later ones.
    for seed in 0..20 {
        let g = gen_gnm(300, 600 + 20 * seed as usize, seed).unwrap();
        let p1 = components(&g, 1).unwrap();
        let p2 = components(&g, 2).unwrap();
        let p3 = components(&g, 3).unwrap();
        let early = components(&g.prefix(g.edge_count() / 2), 2).unwrap();
        for (fine, coarse, what) in [
            (&p2, &p1, "k=2 in k=1"),
            (&p3, &p2, "k=3 in k=2"),
            (&early, &p2, "prefix"),
        ] {
            let refines = fine
                .components
                .iter()
                .all(|c| c.iter().all(|&v| coarse.same_component(c[0], v)));
            if !refines {
                failures.push(format!("refinement {what}, seed {seed}"));
            }
        }
        // Nested cores.
        for kappa in 2..6 {
            let outer = kcore(&g, kappa);
            let inner = kcore(&g, kappa + 1);
            if !inner
                .vertices
                .iter()
                .all(|v| outer.vertices.binary_search(v).is_ok())
            {
                failures.push(format!("nested cores, seed {seed}, kappa {kappa}"));
            }
        }
    }

    // Greedy rank grows by 0 or 1 per edge and matches the checkpoint ranks.
    for seed in 0..10 {
        let trace = run_process(200, 2, &[100, 200, 300, 400], seed).unwrap();
        let mut sum = 0;
        let mut at = 0;
        for c in &trace.checkpoints {
            while at < c.m {
                if trace.increments[at] > 1 {
                    failures.push(format!("increment above 1, seed {seed}"));
                }
                sum += trace.increments[at] as usize;
                at += 1;
            }
            if sum != c.rank {
                failures.push(format!("rank trace mismatch, seed {seed}"));
            }
        }
    }

    // Layer conditions on K_2k, which splits into k spanning paths, plus
    // vertices hung on k earlier vertices each.
    for seed in 0..30u64 {
        let k = 2 + (seed % 3) as usize;
        let base = 2 * k;
        let extra = 5 + (seed % 7) as usize;
        let mut g = Graph::empty(base + extra);
        for &(u, v) in Graph::complete(base).edges() {
            g.push_edge(u, v).unwrap();
        }
        for v in base..base + extra {
            let mut earlier: Vec<usize> = (0..v).collect();
            earlier.shuffle(&mut rng);
            for &w in &earlier[..k] {
                g.push_edge(v, w).unwrap();
            }
        }
        match normal_representation(&g, k) {
            Ok(layers) => {
                if let Err(e) = layers.verify(&g, k) {
                    failures.push(format!("layers, seed {seed}: {e}"));
                }
            }
            Err(e) => failures.push(format!("layers, seed {seed}: {e}")),
        }
    }

    if failures.is_empty() {
        Ok(
            "submodularity 200, refinement 60, nested cores 80, rank traces 10, layerings 30"
                .into(),
        )
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("rank oracle equivalence", rank_oracle),
        ("optimum oracle equivalence", optimum_oracle),
        ("MST constant", mst_constant),
        ("limit weight k=2,3", limit_weights),
        ("rank density", rank_density),
        ("deep component structure", structure),
        ("core laws", core_laws),
        ("analytic self-consistency", analytic_consistency),
        ("invariant suite", invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
