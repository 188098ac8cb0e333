use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use caga_core::bench::{
    baseline_config, export_history, run_suite, sweep, Overrides, Problem, Suite, SweepSpec,
};
use caga_core::elementary::{evolve, random_row, render, BinaryRule};
use caga_core::truss::{assess, TrussProblem};
use caga_core::RunConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod report;

#[derive(Parser)]
#[command(
    name = "caga",
    version,
    about = "Cellular-automaton genetic algorithm experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a test function (f1..f10) or truss many times and summarize.
    Bench(BenchArgs),
    /// Size a truss and report the best feasible design.
    Truss(TrussArgs),
    /// Vary one setting over a list of values.
    Sweep(SweepArgs),
    /// Evolve an elementary cellular automaton and write a bitmap.
    DemoCa(DemoArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// TOML file of setting overrides (keys as for --set).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. --set best-period=4. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Lattice size.
    #[arg(long)]
    pop: Option<usize>,
    /// Evaluation budget per run.
    #[arg(long)]
    evals: Option<usize>,
    /// Generations per run (alternative to --evals).
    #[arg(long)]
    generations: Option<usize>,
    /// Write a JSON summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// f1..f10, ten_bar, seventeen_bar or a truss file.
    #[arg(long = "fn", value_name = "NAME")]
    function: String,
    #[arg(long, default_value_t = 60)]
    runs: usize,
    #[command(flatten)]
    run: RunArgs,
    /// History CSV (generation,run_id,best_so_far_raw).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrussArgs {
    /// ten_bar, seventeen_bar or a truss file.
    #[arg(long, default_value = "ten_bar")]
    model: String,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "fn", value_name = "NAME")]
    function: String,
    /// KEY=a..b or KEY=v1,v2,...
    #[arg(long)]
    vary: SweepSpec,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[command(flatten)]
    run: RunArgs,
    /// Sweep table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialRow {
    Random,
    Single,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 200)]
    width: usize,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Mean number of cells flipped after each step.
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Wolfram rule number.
    #[arg(long, default_value_t = 165)]
    rule: u8,
    #[arg(long, value_enum, default_value_t = InitialRow::Random)]
    init: InitialRow,
    /// PBM output; without it the tape is printed as text.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the 0/1 text dump here.
    #[arg(long)]
    text: Option<PathBuf>,
}

fn overrides(args: &RunArgs) -> Result<Overrides> {
    let mut o = match &args.config {
        Some(path) => Overrides::load(path)?,
        None => Overrides::default(),
    };
    for pair in &args.set {
        let (k, v) = pair
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got {pair:?}"))?;
        o.set(k.trim(), v.trim())?;
    }
    if args.pop.is_some() {
        o.population = args.pop;
    }
    if args.evals.is_some() {
        o.evaluations = args.evals;
        o.generations = None;
    }
    if args.generations.is_some() {
        o.generations = args.generations;
        o.evaluations = None;
    }
    Ok(o)
}

fn prepare(name: &str, args: &RunArgs) -> Result<(RunConfig, Problem)> {
    let mut problem = Problem::resolve(name)?;
    let mut config = baseline_config(name)?;
    let o = overrides(args)?;
    o.apply(&mut config)?;
    if let Problem::Truss(t) = &mut problem {
        o.apply_penalty(&mut t.penalty)?;
    }
    Ok((config, problem))
}

fn write_summary(path: &Path, summary: &report::Summary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn finish(
    name: &str,
    runs: usize,
    args: &RunArgs,
    out: Option<&Path>,
    config: &RunConfig,
    problem: &Problem,
    suite: &Suite,
) -> Result<()> {
    if let Some(path) = out {
        export_history(&suite.results, path)?;
    }
    let best = report::best_design(problem, suite);
    if let Some(path) = &args.summary {
        let summary = report::Summary {
            problem: name.to_string(),
            runs,
            seed: args.seed,
            config: config.clone(),
            stats: suite.stats.clone(),
            best_design: best.clone(),
        };
        write_summary(path, &summary)?;
    }
    print!("{}", report::config_text(name, runs, args.seed, config));
    print!("{}", report::stats_text(&suite.stats));
    if let (Problem::Truss(t), Some(design)) = (problem, &best) {
        print!("{}", truss_text(t, design)?);
    }
    Ok(())
}

fn truss_text(problem: &TrussProblem, design: &[f64]) -> Result<String> {
    let a = assess(&problem.model, design, &problem.penalty, 1.0)?;
    Ok(report::truss_text(&problem.model, design, &a))
}

fn bench(args: BenchArgs) -> Result<()> {
    let (config, problem) = prepare(&args.function, &args.run)?;
    let suite = run_suite(&config, &problem, args.runs, args.run.seed)?;
    finish(
        &args.function,
        args.runs,
        &args.run,
        args.out.as_deref(),
        &config,
        &problem,
        &suite,
    )
}

fn truss(args: TrussArgs) -> Result<()> {
    let (config, problem) = prepare(&args.model, &args.run)?;
    if !matches!(problem, Problem::Truss(_)) {
        bail!("{} is not a truss model", args.model);
    }
    let suite = run_suite(&config, &problem, args.runs, args.run.seed)?;
    finish(
        &args.model,
        args.runs,
        &args.run,
        args.out.as_deref(),
        &config,
        &problem,
        &suite,
    )
}

fn sweep_cmd(args: SweepArgs) -> Result<()> {
    let (config, problem) = prepare(&args.function, &args.run)?;
    let points = sweep(&config, &problem, &args.vary, args.runs, args.run.seed)?;
    print!(
        "{}",
        report::config_text(&args.function, args.runs, args.run.seed, &config)
    );
    let table = report::sweep_text(&args.vary.key, &points);
    print!("{table}");
    if let Some(path) = &args.out {
        std::fs::write(path, report::sweep_csv(&args.vary.key, &points))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.run.summary {
        let text = serde_json::to_string_pretty(&report::sweep_summary(
            &args.function,
            &args.vary.key,
            args.runs,
            args.run.seed,
            &config,
            &points,
        ))?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn demo_ca(args: DemoArgs) -> Result<()> {
    if args.width == 0 {
        bail!("--width must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let row = match args.init {
        InitialRow::Random => random_row(args.width, &mut rng),
        InitialRow::Single => {
            let mut r = vec![0; args.width];
            r[args.width / 2] = 1;
            r
        }
    };
    let rule = BinaryRule::from_wolfram(args.rule);
    let history = evolve(&rule, &row, args.steps, args.perturb, &mut rng)?;
    match &args.out {
        Some(path) => {
            render(&history, path, args.text.as_deref())?;
            let flips: usize = history.flips().iter().map(Vec::len).sum();
            println!(
                "rule {} | {} x {} | {flips} flipped cells | {}",
                args.rule,
                history.width(),
                history.height(),
                path.display()
            );
        }
        None => {
            if let Some(t) = &args.text {
                std::fs::write(t, history.to_text())
                    .with_context(|| format!("writing {}", t.display()))?;
            }
            print!("{}", history.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Truss(a) => truss(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::DemoCa(a) => demo_ca(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
