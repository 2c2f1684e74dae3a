use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kforest::format::{emit_graph, emit_solution, parse_graph, parse_solution, GraphFile};
use kforest::generate::{gnm, ktrees};
use kforest::{
    forests, partition_opt_certificate, solve_kforest, verify_assignments, MultiGraph,
    OptimalityCheck,
};

#[derive(Parser)]
#[command(
    name = "kforest",
    version,
    about = "Maximum k edge-disjoint forests of a multigraph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a graph file and write a solution file.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write solver statistics as JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check a solution file against its graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Also compare the size against an independently computed optimum.
        #[arg(long)]
        check_optimal: bool,
    },
    /// Print the optimum computed by a reference method.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: OracleMethod,
    },
    /// Time the solver on generated instances and print CSV.
    Bench {
        #[arg(long, value_enum)]
        model: Model,
        /// Comma-separated vertex counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        /// Edges per vertex for gnm.
        #[arg(long, default_value_t = 5)]
        degree: usize,
        /// Worker threads; each solve itself stays single-threaded.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write a random graph file.
    Generate {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(short, long)]
        n: usize,
        /// Edge count (gnm).
        #[arg(short, long)]
        m: Option<usize>,
        /// Forest count written to the problem line; tree count for ktrees.
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMethod {
    Partition,
    Augment,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Model {
    Gnm,
    Ktrees,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Gnm => "gnm",
            Model::Ktrees => "ktrees",
        }
    }
}

/// A command failure and the exit code it maps to.
#[derive(Debug)]
enum Failure {
    /// Verification found a problem.
    Rejected,
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Rejected => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<kforest::Error> for Failure {
    fn from(e: kforest::Error) -> Self {
        match e {
            kforest::Error::Invariant(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<GraphFile, Failure> {
    let file = parse_graph(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for w in &file.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(file)
}

fn solve(input: &Path, out: &Path, stats_path: Option<&Path>) -> Result<(), Failure> {
    let file = load_graph(input)?;
    let start = Instant::now();
    let (family, stats) = forests(&file.graph, file.k)?;
    let elapsed = start.elapsed().as_secs_f64();
    write(out, &emit_solution(&family))?;
    if let Some(path) = stats_path {
        let mut doc = serde_json::to_value(&stats).map_err(|e| Failure::Internal(e.to_string()))?;
        doc["elapsed_seconds"] = serde_json::json!(elapsed);
        let text =
            serde_json::to_string_pretty(&doc).map_err(|e| Failure::Internal(e.to_string()))?;
        write(path, &(text + "\n"))?;
    }
    println!(
        "size {} (n={} m={} k={}) in {} iterations, {:.3}s",
        family.len(),
        stats.vertices,
        stats.edges,
        stats.k,
        stats.iterations,
        elapsed
    );
    Ok(())
}

fn verify(graph: &Path, solution: &Path, check_optimal: bool) -> Result<(), Failure> {
    let file = load_graph(graph)?;
    let sol = parse_solution(&read(solution)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", solution.display())))?;
    let check = if check_optimal {
        OptimalityCheck::Auto
    } else {
        OptimalityCheck::Skip
    };
    let report = verify_assignments(&file.graph, file.k, &sol.assignments, check);
    for failure in &report.failures {
        println!("FAIL {failure}");
    }
    match (report.passed(), report.optimum) {
        (true, Some(opt)) => println!("PASS size {} optimal {opt}", report.size),
        (true, None) => println!("PASS size {}", report.size),
        (false, _) => {}
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn oracle(input: &Path, method: OracleMethod) -> Result<(), Failure> {
    let file = load_graph(input)?;
    match method {
        OracleMethod::Partition => {
            let cert = partition_opt_certificate(&file.graph, file.k)?;
            println!("{}", cert.value);
            let blocks: Vec<String> = cert
                .parts
                .iter()
                .map(|part| {
                    let names: Vec<String> = part.iter().map(|v| (v + 1).to_string()).collect();
                    format!("{{{}}}", names.join(" "))
                })
                .collect();
            println!("partition {}", blocks.join(" "));
        }
        OracleMethod::Augment => {
            println!("{}", solve_kforest(&file.graph, file.k, None)?.len());
        }
    }
    Ok(())
}

fn generate_graph(
    model: Model,
    n: usize,
    m: Option<usize>,
    k: usize,
    seed: u64,
) -> Result<MultiGraph, Failure> {
    Ok(match model {
        Model::Gnm => {
            let m = m.ok_or_else(|| Failure::Input("gnm needs --m".into()))?;
            gnm(n, m, seed)?
        }
        Model::Ktrees => ktrees(n, k, seed)?,
    })
}

fn generate(
    model: Model,
    n: usize,
    m: Option<usize>,
    k: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let g = generate_graph(model, n, m, k, seed)?;
    let comments = vec![format!(
        "{} n={n} m={} k={k} seed={seed}",
        model.name(),
        g.edge_count()
    )];
    let text = emit_graph(&g, k, &comments);
    match out {
        Some(path) => write(path, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(e.to_string())),
    }
}

fn bench(
    model: Model,
    sizes: &[usize],
    seed: u64,
    k: usize,
    degree: usize,
    jobs: usize,
) -> Result<(), Failure> {
    let run = |n: usize| -> Result<String, Failure> {
        let g = generate_graph(model, n, Some(n * degree), k, seed)?;
        let start = Instant::now();
        let (family, stats) = forests(&g, k)?;
        let seconds = start.elapsed().as_secs_f64();
        Ok(format!(
            "{},{n},{},{k},{seed},{},{},{},{},{seconds:.6}",
            model.name(),
            g.edge_count(),
            family.len(),
            stats.iterations,
            stats.iteration_bound,
            stats.flow_calls
        ))
    };

    let jobs = jobs.max(1);
    let mut rows: Vec<Option<Result<String, Failure>>> = (0..sizes.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|worker| {
                let run = &run;
                scope.spawn(move || {
                    (worker..sizes.len())
                        .step_by(jobs)
                        .map(|i| (i, run(sizes[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (i, row) in handle.join().expect("bench worker panicked") {
                rows[i] = Some(row);
            }
        }
    });

    println!("model,n,m,k,seed,size,iterations,iteration_bound,flow_calls,seconds");
    for row in rows.into_iter().flatten() {
        println!("{}", row?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { input, out, stats } => solve(input, out, stats.as_deref()),
        Command::Verify {
            graph,
            solution,
            check_optimal,
        } => verify(graph, solution, *check_optimal),
        Command::Oracle { input, method } => oracle(input, *method),
        Command::Bench {
            model,
            sizes,
            seed,
            k,
            degree,
            jobs,
        } => bench(*model, sizes, *seed, *k, *degree, *jobs),
        Command::Generate {
            model,
            n,
            m,
            k,
            seed,
            out,
        } => generate(*model, *n, *m, *k, *seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Rejected => {}
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Internal(msg) => eprintln!("internal error: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
