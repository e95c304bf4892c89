//! Monte-Carlo runs that pair empirical statistics of random graphs with the
//! limits from [`crate::analytic`].
//!
//! Trial `t` draws from its own ChaCha stream `(seed, t)`, so records do not
//! depend on how trials are scheduled across threads.

mod records;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

pub use records::{
    emit_csv, parse_records, read_records, write_records, ExperimentRecord, Metric, RowKind,
    TrialStatus, CSV_HEADER,
};

use crate::analytic::{self, SolverConfig};
use crate::deep::components;
use crate::error::{Error, Result};
use crate::graph::{
    gnm_with, gnp_with, kcore, pair_count, weighted_complete_with, WeightDistribution,
};
use crate::ktrees::{min_weight_union, run_process_with};
use crate::matroid::rank_of;
use crate::rng::trial_rng;

/// Largest `n` accepted without [`ExperimentConfig::allow_large`].
pub const MAX_N_WITHOUT_OVERRIDE: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Weight,
    Structure,
    Rank,
    Core,
    Density,
    Process,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Weight => "weight",
            ExperimentKind::Structure => "structure",
            ExperimentKind::Rank => "rank",
            ExperimentKind::Core => "core",
            ExperimentKind::Density => "density",
            ExperimentKind::Process => "process",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "weight" => ExperimentKind::Weight,
            "structure" => ExperimentKind::Structure,
            "rank" => ExperimentKind::Rank,
            "core" => ExperimentKind::Core,
            "density" => ExperimentKind::Density,
            "process" => ExperimentKind::Process,
            _ => return Err(Error::invalid(format!("unknown experiment kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Edge weights for the weight experiment.
    pub distribution: WeightDistribution,
    /// Mean degrees, ascending. Empty means a default grid around the
    /// relevant threshold.
    pub degrees: Vec<f64>,
    /// Edge counts for the process experiment, ascending.
    pub checkpoints: Vec<usize>,
    pub allow_large: bool,
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: usize, k: usize, trials: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            k,
            trials,
            seed,
            distribution: WeightDistribution::Uniform01,
            degrees: Vec::new(),
            checkpoints: Vec::new(),
            allow_large: false,
            solver: SolverConfig::default(),
        }
    }

    pub fn with_degrees(mut self, degrees: Vec<f64>) -> Self {
        self.degrees = degrees;
        self
    }

    pub fn with_distribution(mut self, dist: WeightDistribution) -> Self {
        self.distribution = dist;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<usize>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if self.n < 2 {
            return Err(Error::invalid(format!("n must be >= 2, got {}", self.n)));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be >= 1"));
        }
        if self.n > MAX_N_WITHOUT_OVERRIDE && !self.allow_large {
            return Err(Error::invalid(format!(
                "n = {} exceeds {MAX_N_WITHOUT_OVERRIDE}; pass the override to run it anyway",
                self.n
            )));
        }
        if self.degrees.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("mean degrees must be finite and >= 0"));
        }
        if self.degrees.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("degree grid must be sorted ascending"));
        }
        if self.checkpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("checkpoints must be sorted ascending"));
        }
        if let Some(&m) = self.checkpoints.last() {
            if m > pair_count(self.n) {
                return Err(Error::invalid(format!(
                    "checkpoint {m} exceeds the vertex pairs of n = {}",
                    self.n
                )));
            }
        }
        if self.kind == ExperimentKind::Process && self.checkpoints.is_empty() {
            return Err(Error::invalid("process experiment needs checkpoints"));
        }
        if matches!(self.kind, ExperimentKind::Rank | ExperimentKind::Density) && self.k < 2 {
            return Err(Error::invalid(format!(
                "{} experiment needs k >= 2",
                self.kind
            )));
        }
        self.distribution.validate()?;
        self.solver.validate()
    }

    /// The explicit grid, or a default one around the threshold of the kind.
    pub fn degree_grid(&self) -> Result<Vec<f64>> {
        if !self.degrees.is_empty() {
            return Ok(self.degrees.clone());
        }
        let cfg = &self.solver;
        let deep = || -> Result<f64> {
            if self.k == 1 {
                Ok(1.0)
            } else {
                analytic::deep_threshold(self.k, cfg)
            }
        };
        let grid = match self.kind {
            ExperimentKind::Structure => {
                let t = deep()?;
                vec![(t - 1.0).max(t / 2.0), t + 1.0]
            }
            ExperimentKind::Rank => {
                let t = deep()?;
                vec![t - 1.0, t + 1.0, t + 3.0]
            }
            ExperimentKind::Core => {
                let (g, _) = analytic::gamma_threshold(self.k + 1, cfg)?;
                vec![(g - 0.5).max(g / 2.0), g + 1.0]
            }
            ExperimentKind::Density => vec![deep()?],
            ExperimentKind::Weight | ExperimentKind::Process => Vec::new(),
        };
        Ok(grid)
    }

    fn edges_for(&self, d: f64) -> Result<usize> {
        let m = (d * self.n as f64 / 2.0).floor() as usize;
        if m > pair_count(self.n) {
            return Err(Error::invalid(format!(
                "mean degree {d} needs more edges than K_{} has",
                self.n
            )));
        }
        Ok(m)
    }
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::invalid(format!("empty {what} list")));
    }
    text.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<T>()
                .map_err(|e| Error::invalid(format!("bad {what} {item:?}: {e}")))
        })
        .collect()
}

/// Parses `d1,d2,...`: finite, non-negative, ascending mean degrees.
pub fn parse_degree_list(text: &str) -> Result<Vec<f64>> {
    let ds: Vec<f64> = parse_list(text, "mean degree")?;
    if ds.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::invalid("mean degrees must be finite and >= 0"));
    }
    if ds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("mean degrees must be ascending"));
    }
    Ok(ds)
}

/// Parses `m1,m2,...`: ascending edge counts.
pub fn parse_checkpoint_list(text: &str) -> Result<Vec<usize>> {
    let ms: Vec<usize> = parse_list(text, "checkpoint")?;
    if ms.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("checkpoints must be ascending"));
    }
    Ok(ms)
}

/// Runs the experiment named by `cfg.kind`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Weight => run_weight_experiment(cfg),
        ExperimentKind::Structure => run_structure_experiment(cfg),
        ExperimentKind::Rank => run_rank_experiment(cfg),
        ExperimentKind::Core => run_core_experiment(cfg),
        ExperimentKind::Density => run_density_check(cfg),
        ExperimentKind::Process => run_process_experiment(cfg),
    }
}

/// One measurement of one trial before it becomes a record.
struct Sample {
    degree: Option<f64>,
    metric: Metric,
    empirical: f64,
    predicted: Option<f64>,
    ok: bool,
}

impl Sample {
    fn new(degree: Option<f64>, metric: Metric, empirical: f64, predicted: Option<f64>) -> Self {
        Self {
            degree,
            metric,
            empirical,
            predicted,
            ok: true,
        }
    }
}

fn require_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::invalid(format!(
            "config is for a {} experiment, not {kind}",
            cfg.kind
        )));
    }
    cfg.validate()
}

/// Runs `trial` for every trial index in parallel, keeping trial order, and
/// appends per-cell summaries.
fn run_trials<F>(cfg: &ExperimentConfig, trial: F) -> Result<Vec<ExperimentRecord>>
where
    F: Fn(&mut crate::rng::StreamRng) -> Result<Vec<Sample>> + Sync,
{
    let per_trial: Vec<Vec<Sample>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(&mut trial_rng(cfg.seed, t as u64)))
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for (t, samples) in per_trial.iter().enumerate() {
        for s in samples {
            out.push(ExperimentRecord::trial_row(
                cfg,
                t,
                s.degree,
                s.metric,
                s.empirical,
                s.predicted,
                s.ok,
            ));
        }
    }
    out.extend(summarize(cfg, &per_trial));
    Ok(out)
}

struct Cell {
    degree: Option<f64>,
    metric: Metric,
    predicted: Option<f64>,
    values: Vec<f64>,
}

fn summarize(cfg: &ExperimentConfig, per_trial: &[Vec<Sample>]) -> Vec<ExperimentRecord> {
    let mut cells: Vec<Cell> = Vec::new();
    for s in per_trial.iter().flatten() {
        let idx = match cells
            .iter()
            .position(|c| c.degree == s.degree && c.metric == s.metric)
        {
            Some(i) => i,
            None => {
                cells.push(Cell {
                    degree: s.degree,
                    metric: s.metric,
                    predicted: s.predicted,
                    values: Vec::new(),
                });
                cells.len() - 1
            }
        };
        if s.ok {
            cells[idx].values.push(s.empirical);
        }
    }
    cells
        .into_iter()
        .map(|c| {
            let (mean, std) = mean_and_std(&c.values);
            ExperimentRecord::summary_row(cfg, c.degree, c.metric, mean, std, c.predicted)
        })
        .collect()
}

fn mean_and_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some(var.sqrt()))
}

/// Minimum-weight union of `k` spanning trees in a randomly weighted `K_n`
/// against the limit weight for the distribution's density slope at 0.
pub fn run_weight_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    require_kind(cfg, ExperimentKind::Weight)?;
    let predicted = analytic::limit_weight(cfg.k, cfg.distribution.density_slope(), &cfg.solver)?;
    run_trials(cfg, |rng| {
        let wg = weighted_complete_with(cfg.n, cfg.distribution, rng)?;
        let sol = min_weight_union(&wg, cfg.k)?;
        let mut s = Sample::new(None, Metric::TotalWeight, sol.total_weight, Some(predicted));
        s.ok = sol.feasible;
        Ok(vec![s])
    })
}

/// Prefixes of one `G(n, m)` sequence per trial, so all grid points of a
/// trial are nested. Each prefix is still a uniform `G(n, m)`.
fn nested_samples<R: Rng, F>(
    cfg: &ExperimentConfig,
    grid: &[f64],
    rng: &mut R,
    mut per_degree: F,
) -> Result<Vec<Sample>>
where
    F: FnMut(usize, f64, &crate::graph::Graph, &mut Vec<Sample>) -> Result<()>,
{
    let ms: Vec<usize> = grid
        .iter()
        .map(|&d| cfg.edges_for(d))
        .collect::<Result<_>>()?;
    let full = gnm_with(cfg.n, ms.last().copied().unwrap_or(0), rng);
    let mut out = Vec::new();
    for (i, (&d, &m)) in grid.iter().zip(&ms).enumerate() {
        per_degree(i, d, &full.prefix(m), &mut out)?;
    }
    Ok(out)
}

/// Largest non-trivial `k`-deeply connected component and the number of
/// non-trivial ones in `G(n, ⌊dn/2⌋)`.
pub fn run_structure_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    require_kind(cfg, ExperimentKind::Structure)?;
    let grid = cfg.degree_grid()?;
    let betas: Vec<f64> = grid
        .iter()
        .map(|&d| analytic::beta(cfg.k, d, &cfg.solver))
        .collect::<Result<_>>()?;
    run_trials(cfg, |rng| {
        nested_samples(cfg, &grid, rng, |i, d, g, out| {
            let p = components(g, cfg.k)?;
            let beta = betas[i];
            out.push(Sample::new(
                Some(d),
                Metric::LargestComponent,
                p.largest_nontrivial() as f64,
                Some(beta * cfg.n as f64),
            ));
            out.push(Sample::new(
                Some(d),
                Metric::NontrivialCount,
                p.nontrivial_count() as f64,
                Some(if beta > 0.0 { 1.0 } else { 0.0 }),
            ));
            Ok(())
        })
    })
}

/// `rank / n` in the union of `k` graphic matroids on `G(n, ⌊dn/2⌋)`.
pub fn run_rank_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    require_kind(cfg, ExperimentKind::Rank)?;
    let grid = cfg.degree_grid()?;
    let preds: Vec<f64> = grid
        .iter()
        .map(|&d| analytic::rank_density(cfg.k, d, &cfg.solver))
        .collect::<Result<_>>()?;
    run_trials(cfg, |rng| {
        nested_samples(cfg, &grid, rng, |i, d, g, out| {
            let r = rank_of(g, cfg.k)?;
            out.push(Sample::new(
                Some(d),
                Metric::RankDensity,
                r as f64 / cfg.n as f64,
                Some(preds[i]),
            ));
            Ok(())
        })
    })
}

/// Size fraction and density of the `(k+1)`-core of `G(n, d/n)`.
pub fn run_core_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    require_kind(cfg, ExperimentKind::Core)?;
    let grid = cfg.degree_grid()?;
    let kappa = cfg.k + 1;
    let laws: Vec<analytic::CoreLaw> = grid
        .iter()
        .map(|&d| analytic::core_law(kappa, d, &cfg.solver))
        .collect::<Result<_>>()?;
    run_trials(cfg, |rng| {
        let mut out = Vec::new();
        for (&d, law) in grid.iter().zip(&laws) {
            let p = (d / cfg.n as f64).min(1.0);
            let core = kcore(&gnp_with(cfg.n, p, rng), kappa);
            out.push(Sample::new(
                Some(d),
                Metric::CoreFraction,
                core.size() as f64 / cfg.n as f64,
                Some(law.fraction),
            ));
            out.push(Sample::new(
                Some(d),
                Metric::CoreDensity,
                core.density,
                Some(law.density),
            ));
        }
        Ok(out)
    })
}

/// `(|E| - rank) / n` on `G(n, ⌊dn/2⌋)`: the share of edges that cannot be
/// covered by `k` forests. The prediction is 0 up to the deep threshold.
pub fn run_density_check(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    require_kind(cfg, ExperimentKind::Density)?;
    let grid = cfg.degree_grid()?;
    run_trials(cfg, |rng| {
        nested_samples(cfg, &grid, rng, |_, d, g, out| {
            let r = rank_of(g, cfg.k)?;
            let deficit = (g.edge_count() - r) as f64 / cfg.n as f64;
            out.push(Sample::new(
                Some(d),
                Metric::RankDeficit,
                deficit,
                Some(0.0),
            ));
            Ok(())
        })
    })
}

/// The random graph process observed at `cfg.checkpoints`, with degree
/// `2m/n` at checkpoint `m`.
pub fn run_process_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    require_kind(cfg, ExperimentKind::Process)?;
    let n = cfg.n as f64;
    let mut preds = Vec::new();
    for &m in &cfg.checkpoints {
        let d = 2.0 * m as f64 / n;
        let rank = if cfg.k >= 2 {
            Some(analytic::rank_density(cfg.k, d, &cfg.solver)?)
        } else {
            None
        };
        let beta = analytic::beta(cfg.k, d, &cfg.solver)?;
        let core = analytic::core_law(cfg.k + 1, d, &cfg.solver)?;
        preds.push((d, rank, beta, core.fraction));
    }
    run_trials(cfg, |rng| {
        let trace = run_process_with(cfg.n, cfg.k, &cfg.checkpoints, rng)?;
        let mut out = Vec::new();
        for (c, &(d, rank, beta, core)) in trace.checkpoints.iter().zip(&preds) {
            out.push(Sample::new(
                Some(d),
                Metric::RankDensity,
                c.rank as f64 / n,
                rank,
            ));
            out.push(Sample::new(
                Some(d),
                Metric::LargestComponent,
                c.largest_nontrivial_component as f64,
                Some(beta * n),
            ));
            out.push(Sample::new(
                Some(d),
                Metric::NontrivialCount,
                c.nontrivial_component_count as f64,
                Some(if beta > 0.0 { 1.0 } else { 0.0 }),
            ));
            out.push(Sample::new(
                Some(d),
                Metric::CoreFraction,
                c.core_size as f64 / n,
                Some(core),
            ));
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = ExperimentConfig::new(ExperimentKind::Rank, 100, 2, 2, 1);
        ok.validate().unwrap();
        assert!(ExperimentConfig {
            trials: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ExperimentConfig { n: 1, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig {
            n: 20_001,
            ..ok.clone()
        }
        .validate()
        .is_err());
        ExperimentConfig {
            n: 20_001,
            allow_large: true,
            ..ok.clone()
        }
        .validate()
        .unwrap();
        assert!(ok.clone().with_degrees(vec![3.0, 2.0]).validate().is_err());
        assert!(ExperimentConfig { k: 1, ..ok.clone() }.validate().is_err());
        let process = ExperimentConfig::new(ExperimentKind::Process, 10, 1, 1, 1);
        assert!(process.validate().is_err());
        assert!(process
            .clone()
            .with_checkpoints(vec![46])
            .validate()
            .is_err());
        process.with_checkpoints(vec![5, 45]).validate().unwrap();
        assert!(run_weight_experiment(&ok).is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_degree_list("1, 2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(parse_degree_list("").is_err());
        assert!(parse_degree_list("2,1").is_err());
        assert!(parse_degree_list("1,nan").is_err());
        assert!(parse_degree_list("-1").is_err());
        assert!(parse_degree_list("1,,2").is_err());
        assert_eq!(parse_checkpoint_list("10,20,20").unwrap(), vec![10, 20, 20]);
        assert!(parse_checkpoint_list("5,-1").is_err());
        assert!(parse_checkpoint_list("9,3").is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in [
            ExperimentKind::Weight,
            ExperimentKind::Structure,
            ExperimentKind::Rank,
            ExperimentKind::Core,
            ExperimentKind::Density,
            ExperimentKind::Process,
        ] {
            assert_eq!(kind.as_str().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn default_grids_bracket_thresholds() {
        let c = SolverConfig::default();
        let ds = analytic::deep_threshold(2, &c).unwrap();
        let rank = ExperimentConfig::new(ExperimentKind::Rank, 100, 2, 1, 0);
        assert_eq!(
            rank.degree_grid().unwrap(),
            vec![ds - 1.0, ds + 1.0, ds + 3.0]
        );
        let core = ExperimentConfig::new(ExperimentKind::Core, 100, 2, 1, 0);
        let (g3, _) = analytic::gamma_threshold(3, &c).unwrap();
        assert_eq!(core.degree_grid().unwrap(), vec![g3 - 0.5, g3 + 1.0]);
    }

    #[test]
    fn summary_statistics() {
        assert_eq!(mean_and_std(&[]), (None, None));
        assert_eq!(mean_and_std(&[2.0]), (Some(2.0), None));
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, Some(2.5));
        assert!((s.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn small_structure_records_are_well_formed() {
        let cfg = ExperimentConfig::new(ExperimentKind::Structure, 8, 2, 3, 5)
            .with_degrees(vec![1.0, 4.0, 6.0]);
        let recs = run_structure_experiment(&cfg).unwrap();
        // 3 trials x 3 degrees x 2 metrics, then 6 summaries.
        assert_eq!(recs.len(), 24);
        for r in &recs[..18] {
            assert_eq!(r.row, RowKind::Trial);
            assert!(r.empirical.unwrap() >= 0.0);
        }
        for r in &recs[18..] {
            assert_eq!(r.row, RowKind::Summary);
            assert_eq!(r.trial, None);
        }
    }

    #[test]
    fn weight_experiment_flags_infeasible_trials() {
        // K_3 has only 3 edges, too few for two spanning trees.
        let cfg = ExperimentConfig::new(ExperimentKind::Weight, 3, 2, 2, 0);
        let recs = run_weight_experiment(&cfg).unwrap();
        assert!(recs[..2].iter().all(|r| r.status == TrialStatus::Failed));
        assert_eq!(recs[2].empirical, None);
    }
}
