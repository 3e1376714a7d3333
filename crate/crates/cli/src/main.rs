use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use bcast_sssp::experiment::{run_algorithm, sweep_cell, Algo, CellSpec, RunOptions};
use bcast_sssp::generate::{generate_instance, InstanceSpec, Model};
use bcast_sssp::graph::{CommNetwork, WeightedDigraph};
use bcast_sssp::report::{log_log_slope, SweepRow, CSV_HEADER};
use bcast_sssp::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bcsssp", version, about = "Broadcast CONGEST shortest-path simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one algorithm on one instance and print a JSON report.
    Run(RunArgs),
    /// Sweep (n, D) cells and print per-cell medians as CSV.
    Sweep(SweepArgs),
    /// Write a generated instance to graph and network files.
    Generate(GenArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Target hop diameter of the generated network.
    #[arg(long, default_value_t = 8)]
    diameter: u64,
    #[arg(long, default_value_t = 100)]
    wmax: u64,
    #[arg(long, default_value = "path-plus-random")]
    model: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Clone, Copy)]
struct FormatArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct RunArgs {
    /// bellman-ford, bounded-hop, auxiliary, exact-v1, exact-v2, approx, or exact with --variant.
    #[arg(long, default_value = "exact")]
    algo: String,
    #[arg(long, default_value = "v1")]
    variant: String,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    /// Hop parameter override.
    #[arg(long)]
    h: Option<u64>,
    /// Inner hop parameter override; selects the clique backend for `auxiliary`.
    #[arg(long)]
    h2: Option<u64>,
    /// Graph file ("n m s W" header, then "u v w" lines).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Network file ("n l" header, then "u v" lines); defaults to the graph's links.
    #[arg(long, requires = "graph")]
    net: Option<PathBuf>,
    #[arg(long)]
    no_verify: bool,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "exact")]
    algo: String,
    #[arg(long, default_value = "v1")]
    variant: String,
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024")]
    n: Vec<usize>,
    /// Comma-separated target diameters.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    diameter: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    wmax: u64,
    #[arg(long, default_value = "path-plus-random")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long)]
    h2: Option<u64>,
    #[arg(long, default_value_t = 3)]
    reps: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    no_verify: bool,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    net: PathBuf,
}

enum Failure {
    Usage(String),
    Io(String),
    Unverified,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Parse { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn resolve_algo(algo: &str, variant: &str) -> Result<Algo, Failure> {
    let name = if algo == "exact" { format!("exact-{variant}") } else { algo.to_string() };
    Ok(name.parse::<Algo>()?)
}

fn generated(a: &InstanceArgs) -> Result<(CommNetwork, WeightedDigraph), Failure> {
    let spec = InstanceSpec {
        n: a.n,
        target_diameter: a.diameter,
        weight_max: a.wmax,
        model: a.model.parse::<Model>()?,
        seed: a.seed,
    };
    Ok(generate_instance(&spec)?)
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let algo = resolve_algo(&a.algo, &a.variant)?;
    let (net, g) = match &a.graph {
        Some(path) => {
            let g = WeightedDigraph::from_text(&read(path)?)?;
            let net = match &a.net {
                Some(p) => CommNetwork::from_text(&read(p)?)?,
                None => CommNetwork::from_digraph(&g)?,
            };
            (net, g)
        }
        None => generated(&a.instance)?,
    };
    let opts = RunOptions { h: a.h, h_prime: a.h2, eps: a.eps, seed: a.instance.seed, verify: !a.no_verify };
    let report = run_algorithm(&net, &g, algo, opts)?;
    if a.format.csv {
        let row = SweepRow {
            n: report.n,
            diameter: report.diameter,
            max_weight: report.max_weight,
            variant: report.variant.clone(),
            h: report.h.unwrap_or(0),
            h_prime: report.h_prime,
            rounds_median: report.rounds as f64,
            words_median: report.total_words as f64,
            verified_all: report.verified != Some(false),
        };
        println!("{CSV_HEADER}\n{}", row.to_csv());
    } else {
        println!("{}", report.to_json());
    }
    if report.verified == Some(false) {
        return Err(Failure::Unverified);
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let algo = resolve_algo(&a.algo, &a.variant)?;
    let model = a.model.parse::<Model>()?;
    let opts = RunOptions { h: a.h, h_prime: a.h2, eps: a.eps, seed: a.seed, verify: !a.no_verify };
    let cells: Vec<CellSpec> = a
        .diameter
        .iter()
        .flat_map(|&d| a.n.iter().map(move |&n| (n, d)))
        .map(|(n, diameter)| CellSpec {
            n,
            diameter,
            weight_max: a.wmax,
            model,
            algo,
            reps: a.reps,
            seed: a.seed,
            opts,
        })
        .collect();
    // Cells run on scoped threads; output keeps cell order.
    let workers = thread::available_parallelism().map_or(1, |p| p.get()).min(cells.len().max(1));
    let mut rows: Vec<Option<Result<SweepRow, Error>>> = (0..cells.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let chunks: Vec<Vec<usize>> = (0..workers).map(|w| (w..cells.len()).step_by(workers).collect()).collect();
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|idx| {
                let cells = &cells;
                scope.spawn(move || idx.into_iter().map(|i| (i, sweep_cell(&cells[i]))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("sweep worker panicked") {
                rows[i] = Some(r);
            }
        }
    });
    let rows: Vec<SweepRow> = rows.into_iter().map(|r| r.expect("every cell ran")).collect::<Result<_, _>>()?;

    if a.format.json {
        let out: Vec<_> = rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "n": r.n, "D": r.diameter, "W": r.max_weight, "variant": r.variant,
                    "h": r.h, "h_prime": r.h_prime, "rounds_median": r.rounds_median,
                    "words_median": r.words_median, "verified_all": r.verified_all,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&out).expect("plain data"));
    } else {
        println!("{CSV_HEADER}");
        for r in &rows {
            println!("{}", r.to_csv());
        }
    }
    for &d in &a.diameter {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.diameter == d && r.rounds_median > 0.0)
            .map(|r| (r.n as f64, r.rounds_median))
            .collect();
        if let Some(slope) = log_log_slope(&pts) {
            eprintln!("slope D={d}: {slope:.3}");
        }
    }
    if rows.iter().any(|r| !r.verified_all) {
        return Err(Failure::Unverified);
    }
    Ok(())
}

fn cmd_generate(a: GenArgs) -> Result<(), Failure> {
    let (net, g) = generated(&a.instance)?;
    let write = |p: &PathBuf, text: String| fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())));
    write(&a.graph, g.to_text())?;
    write(&a.net, net.to_text())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Unverified) => {
            eprintln!("error: verification against the sequential oracle failed");
            ExitCode::from(3)
        }
    }
}
