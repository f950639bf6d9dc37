use std::path::PathBuf;
use std::process::ExitCode;

use amanpg::spca::SPARSITY_THRESHOLD;
use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};

use amanpg_bench::report::{format_table, write_all};
use amanpg_bench::{run_experiment, DatasetSpec, ExperimentSpec, Method, Scale, SolverOverrides};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DatasetKind {
    Random,
    Synthetic,
    Csv,
}

/// Sparse PCA benchmark: sweeps solvers over penalties and seeds and writes
/// per-run histories plus a summary.
#[derive(Debug, Parser)]
#[command(name = "amanpg-bench", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "random")]
    dataset: DatasetKind,
    /// Input file for `--dataset csv`.
    #[arg(long)]
    csv_path: Option<PathBuf>,
    /// Skip column centering of CSV input.
    #[arg(long)]
    no_center: bool,
    /// Column scaling applied after centering.
    #[arg(long, value_enum, default_value = "unit-norm")]
    scale: ScaleArg,
    /// Number of samples (rows).
    #[arg(long, default_value_t = 40)]
    m: usize,
    /// Number of variables (columns).
    #[arg(long, default_value_t = 3000)]
    n: usize,
    /// Number of loading vectors.
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Penalty weight; repeat for a grid.
    #[arg(long = "lambda", default_values_t = [2.0, 2.5, 3.0])]
    lambdas: Vec<f64>,
    /// manpg, manpg-ada or amanpg, with an optional `-d` suffix; repeatable.
    #[arg(long = "variant")]
    variants: Vec<Method>,
    /// A count N (seeds 1..=N) or a comma-separated list.
    #[arg(long, default_value = "20")]
    seeds: String,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    safeguard_period: Option<usize>,
    #[arg(long, default_value_t = SPARSITY_THRESHOLD)]
    sparsity_thresh: f64,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Concurrent runs; keep at 1 for meaningful timings.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScaleArg {
    UnitNorm,
    UnitStd,
}

fn parse_seeds(s: &str) -> anyhow::Result<Vec<u64>> {
    if s.contains(',') {
        return s
            .split(',')
            .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad seed `{t}`")))
            .collect();
    }
    let n: u64 = s.trim().parse().with_context(|| format!("bad seed count `{s}`"))?;
    if n == 0 {
        bail!("seed count must be positive");
    }
    Ok((1..=n).collect())
}

fn build_spec(cli: Cli) -> anyhow::Result<(ExperimentSpec, PathBuf)> {
    let dataset = match cli.dataset {
        DatasetKind::Random => DatasetSpec::Random { m: cli.m, n: cli.n },
        DatasetKind::Synthetic => DatasetSpec::Synthetic { m: cli.m, n: cli.n },
        DatasetKind::Csv => DatasetSpec::Csv {
            path: cli.csv_path.context("--dataset csv requires --csv-path")?,
            center: !cli.no_center,
        },
    };
    let mut spec = ExperimentSpec::new(dataset, cli.p);
    spec.scale = match cli.scale {
        ScaleArg::UnitNorm => Scale::UnitNorm,
        ScaleArg::UnitStd => Scale::UnitStd,
    };
    spec.lambdas = cli.lambdas;
    spec.methods = if cli.variants.is_empty() {
        Method::all()
    } else {
        cli.variants
    };
    spec.seeds = parse_seeds(&cli.seeds)?;
    spec.sparsity_thresh = cli.sparsity_thresh;
    spec.solver = SolverOverrides {
        max_iters: cli.max_iters,
        mu: cli.mu,
        tau: cli.tau,
        sigma: cli.sigma,
        nu: cli.nu,
        safeguard_period: cli.safeguard_period,
    };
    spec.jobs = cli.jobs;
    spec.validate()?;
    Ok((spec, cli.out_dir))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (spec, out_dir) = build_spec(cli)?;
    eprintln!("running {} solves", spec.run_count());
    let result = run_experiment(&spec)?;
    for r in result.runs.iter().filter(|r| r.failed()) {
        let why = match &r.report {
            Ok(rep) => match &rep.status {
                amanpg::RunStatus::Failed(msg) => msg.clone(),
                other => other.as_str().to_string(),
            },
            Err(e) => e.clone(),
        };
        eprintln!("{} lambda={} seed={}: {why}", r.method, r.lambda, r.seed);
    }
    let written = write_all(&out_dir, &result)?;
    print!("{}", format_table(&result.summary));
    eprintln!("wrote {} files to {}", written.len(), out_dir.display());
    Ok(result.runs.iter().all(|r| !r.failed()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
