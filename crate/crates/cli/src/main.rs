//! `hippo` — command-line front end for the optimisation experiments.
//!
//! `hippo run` executes one seeded experiment and writes its step records
//! as CSV; `hippo plot` folds one or more such CSVs into an SVG of regret
//! versus evaluations. Exit codes: 0 on success, 1 for configuration
//! errors, 2 when every seed of a run failed.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Context};
use clap::{Args, Parser, Subcommand};
use hippo_core::benchmarks::BenchmarkProblem;
use hippo_core::harness::{self, ExperimentConfig, Method, OptimiserSettings};

#[derive(Parser)]
#[command(
    name = "hippo",
    version,
    about = "Batch multi-objective Bayesian optimisation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its step records as CSV.
    Run(Box<RunArgs>),
    /// Combine run CSVs from a directory into an SVG regret plot.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON file mirroring the experiment-config fields; explicit flags
    /// override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Benchmark name (vlmop2, dtlz2, hartmann_ackley).
    #[arg(long)]
    problem: Option<String>,
    /// Batch strategy (hippo, kb, random, sequential-ehvi).
    #[arg(long)]
    method: Option<Method>,
    /// Points per optimisation step [default: 4].
    #[arg(long)]
    batch_size: Option<usize>,
    /// Initial design size [default: 2·dim + 2].
    #[arg(long = "init")]
    init_points: Option<usize>,
    /// Total evaluation budget including the initial design [default: 150].
    #[arg(long = "budget")]
    total_budget: Option<usize>,
    /// Replication seeds: integers and/or half-open ranges like 0..10
    /// [default: 0..10].
    #[arg(long, num_args = 1.., value_delimiter = ',', value_name = "SEED|A..B")]
    seeds: Option<Vec<String>>,
    /// Directory receiving <problem>_<method>_b<B>.csv [default: .].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Space-filling samples per acquisition maximisation.
    #[arg(long)]
    sample_budget: Option<usize>,
    /// Compass-refinement restarts of the acquisition maximiser.
    #[arg(long)]
    restarts: Option<usize>,
    /// Multi-start count for each surrogate hyperparameter fit.
    #[arg(long)]
    fit_restarts: Option<usize>,
    /// Record zeros instead of wall times, making reruns byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Directory whose .csv files become one labelled series each.
    #[arg(long = "in", value_name = "DIR")]
    input: PathBuf,
    /// Destination SVG file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit 1 (clap's default of 2 is reserved for runs whose
    // seeds all failed); --help and --version stay success.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(*args),
        Command::Plot(args) => plot(args),
    }
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = build_config(args)?;
    let outcome = harness::run_experiment(&cfg)?;

    let dir = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let file = dir.join(format!("{}_{}_b{}.csv", cfg.problem, cfg.method, cfg.batch_size));
    harness::write_csv(&file, &outcome.records)
        .with_context(|| format!("writing {}", file.display()))?;

    for failure in &outcome.failures {
        eprintln!(
            "seed {} failed at step {}: {}",
            failure.seed, failure.step, failure.message
        );
    }
    if outcome.datasets.is_empty() {
        eprintln!("all {} seed(s) failed", cfg.seeds.len());
        return Ok(ExitCode::from(2));
    }
    println!(
        "wrote {} records from {} seed(s) to {}",
        outcome.records.len(),
        outcome.datasets.len(),
        file.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Layers the command line over the optional config file: the file (or
/// the documented defaults) forms the base and every explicit flag wins.
fn build_config(args: RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str::<ExperimentConfig>(&text)
            .with_context(|| format!("parsing {}", path.display()))?
    } else {
        let problem = args
            .problem
            .clone()
            .context("--problem is required without --config")?;
        let method = args.method.context("--method is required without --config")?;
        let input_dim = BenchmarkProblem::by_name(&problem)?.input_dim();
        ExperimentConfig {
            problem,
            method,
            batch_size: 4,
            init_points: 2 * input_dim + 2,
            total_budget: 150,
            seeds: (0..10).collect(),
            optimiser: OptimiserSettings::default(),
            output_path: None,
            record_timing: true,
        }
    };

    if let Some(problem) = args.problem {
        cfg.problem = problem;
    }
    if let Some(method) = args.method {
        cfg.method = method;
    }
    if let Some(batch_size) = args.batch_size {
        cfg.batch_size = batch_size;
    }
    if let Some(init_points) = args.init_points {
        cfg.init_points = init_points;
    }
    if let Some(total_budget) = args.total_budget {
        cfg.total_budget = total_budget;
    }
    if let Some(specs) = args.seeds {
        cfg.seeds = parse_seeds(&specs)?;
    }
    if let Some(out) = args.out {
        cfg.output_path = Some(out);
    }
    if let Some(sample_budget) = args.sample_budget {
        cfg.optimiser.sample_budget = Some(sample_budget);
    }
    if let Some(restarts) = args.restarts {
        cfg.optimiser.restarts = restarts;
    }
    if let Some(fit_restarts) = args.fit_restarts {
        cfg.optimiser.fit_restarts = fit_restarts;
    }
    if args.no_timing {
        cfg.record_timing = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_seeds(patterns: &[String]) -> anyhow::Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for pattern in patterns {
        if let Some((a, b)) = pattern.split_once("..") {
            let start: u64 = a
                .trim()
                .parse()
                .with_context(|| format!("bad start of seed range {pattern:?}"))?;
            let end: u64 = b
                .trim()
                .parse()
                .with_context(|| format!("bad end of seed range {pattern:?}"))?;
            ensure!(start < end, "empty seed range {pattern:?}");
            seeds.extend(start..end);
        } else {
            seeds.push(
                pattern
                    .trim()
                    .parse()
                    .with_context(|| format!("bad seed {pattern:?}"))?,
            );
        }
    }
    Ok(seeds)
}

fn plot(args: PlotArgs) -> anyhow::Result<ExitCode> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    paths.sort();
    ensure!(
        !paths.is_empty(),
        "no .csv files in {}",
        args.input.display()
    );

    let mut series = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        let records =
            harness::parse_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
        let label = path
            .file_stem()
            .map(|stem| stem.to_string_lossy().into_owned())
            .unwrap_or_default();
        series.push((label, records));
    }
    harness::write_regret_plot(&args.out, &series)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}
