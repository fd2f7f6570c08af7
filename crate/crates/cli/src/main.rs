use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use plantprop::benchmark::BenchmarkFunction;
use plantprop::evolve::{
    self, hamburger_report, Algorithm, GraphEvolutionConfig, GraphRunRecord, HamburgerReport,
};
use plantprop::graph::{ks_edge_count, parse_edge_list, serialize_edge_list};
use plantprop::hamiltonian::{decide, Decision, DEFAULT_RECURSION_CAP};
use plantprop::ppa::{run_ppa, PpaParams};
use plantprop::spfp::{self, CompositeStack, SubsetSumInstance};
use plantprop::sweep::{self, SweepGrid, Window};

const EXIT_USAGE: u8 = 1;
const EXIT_CAPPED: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "plantprop",
    version,
    about = "Plant propagation and hard-instance experiments"
)]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweep cells and offspring evaluation.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide Hamiltonicity of an edge-list graph.
    Solve(SolveArgs),
    /// Evolve a graph that is hard for the solver.
    Evolve(EvolveArgs),
    /// Sweep pop_size x n_max for the continuous PPA and emit CSV.
    Sweep(SweepArgs),
    /// Run the continuous PPA once.
    Optimize(OptimizeArgs),
    /// Transform a subset-sum instance into a compositing instance and back.
    Reduce(ReduceArgs),
    /// Alpha-composite greyscale layers over black.
    Composite(CompositeArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RECURSION_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Hc,
    Ppa,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    vertices: usize,
    /// Initial edge count; defaults to the Hamiltonicity threshold for the
    /// vertex count.
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = evolve::DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    function: String,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 10_000)]
    evals: usize,
    /// Inclusive range `LO..HI` or a comma list.
    #[arg(long, default_value = "1..40", value_parser = parse_int_set)]
    pop: IntSet,
    #[arg(long, default_value = "1..10", value_parser = parse_int_set)]
    nmax: IntSet,
    /// Also write a heatmap.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    function: String,
    #[arg(long)]
    pop: usize,
    #[arg(long)]
    nmax: usize,
    #[arg(long, default_value_t = 10_000)]
    evals: usize,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    set: Vec<u64>,
    #[arg(long)]
    target: u64,
}

#[derive(Args, Debug)]
struct CompositeArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    greys: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
}

#[derive(Clone, Debug)]
struct IntSet(Vec<usize>);

fn parse_int_set(s: &str) -> Result<IntSet, String> {
    let bad = || format!("expected LO..HI or a comma list, got {s:?}");
    let values: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err(format!("{s:?} must name at least one positive value"));
    }
    Ok(IntSet(values))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

fn function_arg(name: &str) -> Result<BenchmarkFunction> {
    Ok(name.parse::<BenchmarkFunction>()?)
}

fn solve(args: &SolveArgs, out: Option<&Path>) -> Result<u8> {
    let text = fs::read_to_string(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let g = parse_edge_list(&text).with_context(|| format!("parsing {}", args.graph.display()))?;
    let outcome = decide(&g, args.cap)?;
    emit(out, &to_json(&outcome)?)?;
    Ok(if outcome.decision == Decision::Aborted {
        EXIT_CAPPED
    } else {
        0
    })
}

#[derive(Serialize)]
struct GraphRunJson<'a> {
    config: &'a GraphEvolutionConfig,
    best_fitness: u64,
    evaluations_used: usize,
    trajectory: &'a [u64],
    best_graph: String,
    report: HamburgerReport,
}

impl<'a> From<&'a GraphRunRecord> for GraphRunJson<'a> {
    fn from(r: &'a GraphRunRecord) -> Self {
        Self {
            config: &r.config,
            best_fitness: r.best_fitness,
            evaluations_used: r.evaluations_used,
            trajectory: &r.fitness_trajectory,
            best_graph: serialize_edge_list(&r.best_graph),
            report: hamburger_report(&r.best_graph),
        }
    }
}

fn evolve_cmd(args: &EvolveArgs, seed: u64, out: Option<&Path>) -> Result<u8> {
    let algorithm = match args.algo {
        Algo::Hc => Algorithm::Hillclimber,
        Algo::Ppa => Algorithm::PlantPropagation,
    };
    let initial_edges = match args.edges {
        Some(e) => e,
        None => ks_edge_count(args.vertices)?,
    };
    let cfg = GraphEvolutionConfig {
        algorithm,
        vertices: args.vertices,
        initial_edges,
        budget: args.budget,
        recursion_cap: args.cap,
        seed,
    };
    cfg.validate()?;
    let record = evolve::evolve(&cfg)?;
    emit(out, &to_json(&GraphRunJson::from(&record))?)?;
    Ok(if record.best_fitness >= cfg.recursion_cap {
        EXIT_CAPPED
    } else {
        0
    })
}

fn sweep_cmd(args: &SweepArgs, seed: u64, out: Option<&Path>) -> Result<u8> {
    let function = function_arg(&args.function)?;
    let grid = SweepGrid {
        pop_sizes: args.pop.0.clone(),
        n_maxes: args.nmax.0.clone(),
        runs_per_cell: args.runs,
        evals_per_run: args.evals,
        base_seed: seed,
    };
    let result = sweep::run_sweep(function, &grid)?;
    emit(out, &sweep::csv_string(&result))?;

    let window = Window::reference();
    match sweep::window_stats(&result, &window) {
        Ok(s) => eprintln!(
            "{function}: inside window mean {:e} sd {:e} ({} cells); outside mean {:e} sd {:e} ({} cells); {} evaluations",
            s.inside.mean, s.inside.sd, s.inside.count, s.outside.mean, s.outside.sd, s.outside.count, result.evaluations
        ),
        Err(e) => eprintln!("{function}: no window summary: {e}"),
    }
    if let Some(path) = &args.svg {
        fs::write(path, sweep::render_svg(&result, &window))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn optimize_cmd(args: &OptimizeArgs, seed: u64, out: Option<&Path>) -> Result<u8> {
    let function = function_arg(&args.function)?;
    let params = PpaParams::new(args.pop, args.nmax, args.evals)?;
    let record = run_ppa(function, params, seed)?;
    emit(out, &to_json(&record)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct ReduceReport {
    set: Vec<u64>,
    target: u64,
    table: Vec<Vec<u64>>,
    target_pixel: u64,
    oracle: spfp::SubsetSumSolution,
    selection: Vec<usize>,
    pixel_value: f64,
    lifted: Vec<u64>,
    lifted_sum: u64,
    verified: bool,
}

fn reduce_cmd(args: &ReduceArgs, out: Option<&Path>) -> Result<u8> {
    let ss = SubsetSumInstance::new(args.set.clone(), args.target)?;
    let inst = spfp::reduce(&ss)?;
    let oracle = spfp::brute_force_subset_sum(&ss)?;
    let selection = oracle.indices.clone();
    let pixel_value = spfp::evaluate_selection(&inst, &selection)?;
    let lifted = spfp::lift(&selection, &inst)?;
    let lifted_sum: u64 = lifted.iter().sum();
    let report = ReduceReport {
        verified: lifted_sum == oracle.best_sum && pixel_value == lifted_sum as f64,
        set: ss.values,
        target: ss.target,
        table: inst.polygon_table,
        target_pixel: inst.target_pixel,
        oracle,
        selection,
        pixel_value,
        lifted,
        lifted_sum,
    };
    emit(out, &to_json(&report)?)?;
    Ok(0)
}

fn composite_cmd(args: &CompositeArgs, out: Option<&Path>) -> Result<u8> {
    if !(0.0..=1.0).contains(&args.alpha) {
        bail!("alpha must lie in [0, 1], got {}", args.alpha);
    }
    if let Some(g) = args.greys.iter().find(|g| !(0.0..=255.0).contains(*g)) {
        bail!("greyscale values must lie in [0, 255], got {g}");
    }
    let value = spfp::composite(&CompositeStack::uniform_alpha(&args.greys, args.alpha));
    emit(out, &format!("{value}\n"))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(usize::from(cli.jobs))
        .build_global()
        .context("starting worker pool")?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Evolve(a) => evolve_cmd(a, cli.seed, out),
        Command::Sweep(a) => sweep_cmd(a, cli.seed, out),
        Command::Optimize(a) => optimize_cmd(a, cli.seed, out),
        Command::Reduce(a) => reduce_cmd(a, out),
        Command::Composite(a) => composite_cmd(a, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
