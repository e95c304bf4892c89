//! `kforest` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kforest::analytic::{self, SolverConfig};
use kforest::deep::{components, normal_representation};
use kforest::experiment::{
    emit_csv, parse_checkpoint_list, parse_degree_list, run_experiment, ExperimentConfig,
    ExperimentKind, ExperimentRecord, RowKind,
};
use kforest::graph::{kcore, read_edge_list, write_edge_list, Graph, WeightDistribution};
use kforest::ktrees::min_weight_union;
use kforest::matroid::rank_of;
use kforest::Error;

#[derive(Parser)]
#[command(
    name = "kforest",
    version,
    about = "Edge-disjoint spanning trees, deep components and random-graph limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lightest union of k edge-disjoint spanning trees.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Write the chosen edges as an edge list.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write forest i to `<prefix>.<i>.edges`.
        #[arg(long)]
        forests_prefix: Option<String>,
    },
    /// Rank of the edge set in the union of k graphic matroids.
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// k-deeply connected components as `component_id<TAB>vertex` lines.
    Components {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Layering of a k-deeply connected graph as `layer<TAB>vertex` lines.
    Layers {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// The kappa-core: a summary line, then one vertex per line.
    Core {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kappa: usize,
    },
    /// Limit quantities for G(n, d/n).
    Predict(PredictArgs),
    /// Monte-Carlo experiment with CSV output.
    Experiment {
        kind: ExperimentChoice,
        #[command(flatten)]
        common: RunArgs,
        #[arg(long)]
        trials: usize,
        /// Mean degrees, comma separated and ascending.
        #[arg(long)]
        degrees: Option<String>,
        /// uniform01, uniform:<b> or exp:<rate>.
        #[arg(long, default_value = "uniform01")]
        dist: String,
    },
    /// Random graph process observed at the given edge counts.
    Process {
        #[command(flatten)]
        common: RunArgs,
        #[arg(long)]
        checkpoints: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    csv: PathBuf,
    /// Accept n above the default size limit.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ExperimentChoice {
    Weight,
    Structure,
    Rank,
    Core,
    Density,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct PredictArgs {
    #[command(subcommand)]
    what: Option<PredictCommand>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    mean_degree: Option<f64>,
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Limit weight for edge weights with density `a` at 0.
    Weight {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: f64,
        /// Relative tolerance of the quadrature.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Core and deep-component thresholds.
    Thresholds {
        #[arg(long)]
        k: usize,
    },
}

enum Failure {
    Invalid(String),
    Infeasible(usize),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Csv { .. } => Failure::Io(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            match &f {
                Failure::Invalid(msg) => eprintln!("error: {msg}"),
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Infeasible(k) => {
                    eprintln!("error: the graph has no {k} edge-disjoint spanning trees")
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Outcome {
    match command {
        Command::Solve {
            input,
            k,
            out: edges_out,
            forests_prefix,
        } => solve(
            &input,
            k,
            edges_out.as_deref(),
            forests_prefix.as_deref(),
            out,
        ),
        Command::Rank { input, k } => {
            let g = read_edge_list(&input)?.graph;
            let r = rank_of(&g, k)?;
            writeln!(out, "rank {r} max {}", k * g.n().saturating_sub(1))?;
            Ok(())
        }
        Command::Components { input, k } => {
            let g = read_edge_list(&input)?.graph;
            let p = components(&g, k)?;
            for v in 0..g.n() {
                writeln!(out, "{}\t{v}", p.component_id[v])?;
            }
            Ok(())
        }
        Command::Layers { input, k } => {
            let g = read_edge_list(&input)?.graph;
            let layers = normal_representation(&g, k)?;
            for (t, vs) in layers.layers.iter().enumerate() {
                for v in vs {
                    writeln!(out, "{t}\t{v}")?;
                }
            }
            Ok(())
        }
        Command::Core { input, kappa } => {
            let g = read_edge_list(&input)?.graph;
            let core = kcore(&g, kappa);
            writeln!(
                out,
                "kappa {kappa} size {} edges {} density {:.6}",
                core.size(),
                core.induced_edge_count,
                core.density
            )?;
            for v in core.vertices {
                writeln!(out, "{v}")?;
            }
            Ok(())
        }
        Command::Predict(args) => predict(args, out),
        Command::Experiment {
            kind,
            common,
            trials,
            degrees,
            dist,
        } => {
            let kind = match kind {
                ExperimentChoice::Weight => ExperimentKind::Weight,
                ExperimentChoice::Structure => ExperimentKind::Structure,
                ExperimentChoice::Rank => ExperimentKind::Rank,
                ExperimentChoice::Core => ExperimentKind::Core,
                ExperimentChoice::Density => ExperimentKind::Density,
            };
            let mut cfg = ExperimentConfig::new(kind, common.n, common.k, trials, common.seed)
                .with_distribution(dist.parse::<WeightDistribution>()?);
            if let Some(text) = degrees {
                cfg = cfg.with_degrees(parse_degree_list(&text)?);
            }
            cfg.allow_large = common.allow_large;
            experiment(&cfg, &common.csv, out)
        }
        Command::Process {
            common,
            checkpoints,
            trials,
        } => {
            let mut cfg = ExperimentConfig::new(
                ExperimentKind::Process,
                common.n,
                common.k,
                trials,
                common.seed,
            )
            .with_checkpoints(parse_checkpoint_list(&checkpoints)?);
            cfg.allow_large = common.allow_large;
            experiment(&cfg, &common.csv, out)
        }
    }
}

fn write_graph_file(path: &Path, graph: &Graph, weights: &[f64]) -> Outcome {
    let file = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    write_edge_list(BufWriter::new(file), graph, Some(weights))
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn solve(
    input: &Path,
    k: usize,
    edges_out: Option<&Path>,
    prefix: Option<&str>,
    out: &mut impl Write,
) -> Outcome {
    let wg = read_edge_list(input)?.into_weighted()?;
    let sol = min_weight_union(&wg, k)?;
    writeln!(out, "weight {} feasible {}", sol.total_weight, sol.feasible)?;
    let pick = |ids: &[usize]| {
        let g = wg.graph().subgraph_by_edges(ids);
        let w: Vec<f64> = ids.iter().map(|&i| wg.weights()[i]).collect();
        (g, w)
    };
    if let Some(path) = edges_out {
        let (g, w) = pick(&sol.chosen_edges);
        write_graph_file(path, &g, &w)?;
    }
    if let Some(prefix) = prefix {
        for (i, forest) in sol.forests.iter().enumerate() {
            let (g, w) = pick(forest);
            write_graph_file(Path::new(&format!("{prefix}.{i}.edges")), &g, &w)?;
        }
    }
    if sol.feasible {
        Ok(())
    } else {
        Err(Failure::Infeasible(k))
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.10}")).unwrap_or_else(|| "NA".into())
}

fn predict(args: PredictArgs, out: &mut impl Write) -> Outcome {
    let cfg = SolverConfig::default();
    match args.what {
        Some(PredictCommand::Weight { k, a, tol }) => {
            let cfg = match tol {
                Some(t) => SolverConfig { rel_tol: t, ..cfg },
                None => cfg,
            };
            let w = analytic::limit_weight_info(k, a, &cfg)?;
            writeln!(out, "k\ta\tlimit_weight\terror_estimate\tx_max")?;
            writeln!(
                out,
                "{k}\t{a}\t{:.12}\t{:.3e}\t{:.6}",
                w.value, w.error_estimate, w.x_max
            )?;
        }
        Some(PredictCommand::Thresholds { k }) => {
            let (gamma, _) = analytic::gamma_threshold(k + 1, &cfg)?;
            writeln!(
                out,
                "k\tcore_gamma\tdeep_threshold\tfixed_point_threshold\tdiscrepancy\tdegenerate"
            )?;
            if k >= 2 {
                let t = analytic::deep_threshold_info(k, &cfg)?;
                writeln!(
                    out,
                    "{k}\t{:.12}\t{:.12}\t{:.12}\t{:.3e}\t{}",
                    gamma, t.d_star, t.fixed_point_d, t.discrepancy, t.degenerate
                )?;
            } else {
                // For k = 1 the giant component appears with the 2-core.
                writeln!(out, "{k}\t{gamma:.12}\t{:.12}\tNA\tNA\tfalse", 1.0)?;
            }
        }
        None => {
            let (Some(k), Some(d)) = (args.k, args.mean_degree) else {
                return Err(Failure::Invalid(
                    "predict needs --k and --mean-degree, or a subcommand".into(),
                ));
            };
            let t = analytic::analytic_table(k, d, &cfg)?;
            writeln!(
                out,
                "k\td\tlambda\tpi_k\tbeta\trank_density\tcore_fraction\tcore_density\tdeep_threshold\tcore_gamma"
            )?;
            writeln!(
                out,
                "{}\t{}\t{}\t{:.10}\t{:.10}\t{}\t{:.10}\t{}\t{:.10}\t{:.10}",
                t.k,
                t.d,
                opt(t.lambda),
                t.pi_k,
                t.beta,
                opt(t.rank_density),
                t.core_fraction,
                opt(t.core_density),
                t.deep_threshold,
                t.core_gamma
            )?;
        }
    }
    Ok(())
}

fn experiment(cfg: &ExperimentConfig, csv: &Path, out: &mut impl Write) -> Outcome {
    let records = run_experiment(cfg)?;
    emit_csv(&records, csv)?;
    print_summaries(&records, out)?;
    writeln!(out, "wrote {} rows to {}", records.len(), csv.display())?;
    Ok(())
}

fn print_summaries(records: &[ExperimentRecord], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "metric\tdegree\tmean\tstd\tpredicted\trel_error")?;
    for r in records.iter().filter(|r| r.row == RowKind::Summary) {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.metric,
            opt(r.degree),
            opt(r.empirical),
            opt(r.std),
            opt(r.predicted),
            opt(r.rel_error)
        )?;
    }
    Ok(())
}
