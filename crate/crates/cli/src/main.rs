use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use epitrace_core::acceptance::{run_all, AcceptanceScale};
use epitrace_core::experiment::{
    plot_data_from_file, run_compare_theory, run_experiment, Algorithm, ExperimentConfig,
    ModelKind, Sweep,
};

/// Source detection on contact networks: replicate sweeps, analytic
/// comparisons, plot data extraction, and the validation suite.
#[derive(Parser)]
#[command(name = "epitrace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicate sweep; writes records.csv and summary.csv.
    Simulate(RunArgs),
    /// Tabulate analytic success predictions next to simulated rates;
    /// writes theory.csv. Models: rbtree_ddenr or ret.
    CompareTheory(RunArgs),
    /// Reshape a summary CSV into per-curve x,mean,lo,hi files, one per
    /// swept parameter and metric.
    PlotData {
        /// summary.csv produced by `simulate`.
        summary: PathBuf,
        /// Directory for the per-curve files.
        #[arg(long, default_value = "plots")]
        out_dir: PathBuf,
    },
    /// Run the acceptance criteria and print one verdict line each.
    Validate {
        /// Reduced sample sizes: every gate still runs, with less power.
        #[arg(long)]
        quick: bool,
        /// Directory for the determinism checks' output (default: a
        /// temporary directory).
        #[arg(long)]
        scratch: Option<PathBuf>,
        /// Print every sub-check, not only failing ones.
        #[arg(long)]
        verbose: bool,
    },
}

/// Sweep parameters accept the flag more than once to sweep a list.
#[derive(Args)]
struct RunArgs {
    /// JSON config file; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// hnm_dde, rbtree_ddenr, or ret.
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Algorithm to run: ls, lsv2, ls+, ls+v2, random_dmp, sg (repeatable).
    #[arg(long = "algo", value_parser = parse_algorithm)]
    algos: Vec<Algorithm>,
    /// Per-contact daily infection probability.
    #[arg(long)]
    p_i: Vec<f64>,
    /// Asymptomatic share.
    #[arg(long)]
    p_a: Vec<f64>,
    /// Daily hospitalization probability for symptomatic cases.
    #[arg(long)]
    p_h: Vec<f64>,
    /// Contact degree.
    #[arg(long)]
    d_c: Vec<usize>,
    /// Household size minus one.
    #[arg(long)]
    d_h: Vec<usize>,
    /// Population size.
    #[arg(long)]
    n: Vec<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Freeze the epidemic at the first hospitalization.
    #[arg(long)]
    freeze: Option<bool>,
    /// Output directory for the CSV files.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: epitrace_core::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: epitrace_core::Error| e.to_string())
}

fn override_sweep<T: Clone>(slot: &mut Sweep<T>, values: &[T]) {
    match values {
        [] => {}
        [one] => *slot = Sweep::Fixed(one.clone()),
        many => *slot = Sweep::List(many.to_vec()),
    }
}

fn resolve_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(model) = args.model {
        cfg.model = model;
    }
    if !args.algos.is_empty() {
        cfg.algorithms = args.algos.clone();
    }
    override_sweep(&mut cfg.p_i, &args.p_i);
    override_sweep(&mut cfg.p_a, &args.p_a);
    override_sweep(&mut cfg.p_h, &args.p_h);
    override_sweep(&mut cfg.d_c, &args.d_c);
    override_sweep(&mut cfg.d_h, &args.d_h);
    override_sweep(&mut cfg.n, &args.n);
    if let Some(replicates) = args.replicates {
        cfg.replicates = replicates;
    }
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(freeze) = args.freeze {
        cfg.freeze_epidemic = freeze;
    }
    if let Some(output) = &args.output {
        cfg.output = output.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = resolve_config(&args)?;
            let out = run_experiment(&cfg)?;
            println!("wrote {} records to {}", out.records, out.records_path.display());
            println!(
                "wrote {} summary rows to {}",
                out.summary_rows,
                out.summary_path.display()
            );
        }
        Command::CompareTheory(args) => {
            let cfg = resolve_config(&args)?;
            let path = run_compare_theory(&cfg)?;
            println!("wrote theory table to {}", path.display());
        }
        Command::PlotData { summary, out_dir } => {
            let files = plot_data_from_file(&summary, &out_dir)?;
            for f in &files {
                println!("wrote {}", f.display());
            }
            if files.is_empty() {
                println!("no swept parameters in {}; nothing to plot", summary.display());
            }
        }
        Command::Validate { quick, scratch, verbose } => {
            let scale = if quick { AcceptanceScale::quick() } else { AcceptanceScale::default() };
            let tmp;
            let scratch_dir = match scratch {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    dir
                }
                None => {
                    tmp = tempfile::tempdir()?;
                    tmp.path().to_path_buf()
                }
            };
            let reports = run_all(&scale, &scratch_dir)?;
            let mut all_passed = true;
            for report in &reports {
                println!("{}", report.summary_line());
                if verbose || !report.passed {
                    for line in &report.details {
                        println!("  {line}");
                    }
                }
                all_passed &= report.passed;
            }
            if !all_passed {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
