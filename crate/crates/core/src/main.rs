use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use twinsep::pipeline::{run, RunConfig};
use twinsep::sieve::DEFAULT_SEGMENT_SIZE;
use twinsep::{CheckpointSpec, FitOptions, Weighting};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightingArg {
    /// Weight each separation bin by its event count.
    Counts,
    /// Weight every observed separation equally.
    Uniform,
}

impl From<WeightingArg> for Weighting {
    fn from(arg: WeightingArg) -> Self {
        match arg {
            WeightingArg::Counts => Weighting::CountWeighted,
            WeightingArg::Uniform => Weighting::Unweighted,
        }
    }
}

/// Twin-prime separation statistics up to a limit, with decay-constant fits
/// at each checkpoint.
#[derive(Debug, Parser)]
#[command(name = "twinsep", version)]
struct Cli {
    /// Inclusive upper bound for the sieve (underscores allowed).
    #[arg(long, value_parser = parse_natural)]
    limit: u64,

    /// Checkpoint as `twin:<k>` (k-th twin pair, counting (3,5)) or `n:<N>`.
    /// Repeatable; defaults to `n:<limit>`.
    #[arg(long = "checkpoint", value_name = "SPEC")]
    checkpoints: Vec<CheckpointSpec>,

    /// Integers per sieve segment.
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SIZE, value_parser = parse_natural)]
    segment_size: u64,

    /// Sieve worker threads; output does not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,

    #[arg(long, value_enum, default_value = "counts")]
    weighting: WeightingArg,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// External `N,pi1,pi2` count table for the m0 comparison.
    #[arg(long)]
    external: Option<PathBuf>,

    /// Add raw prime and twin counts to summary.csv.
    #[arg(long)]
    raw_counts: bool,

    /// Determine the pi1 convention from the embedded published slope table.
    #[arg(long)]
    verify_table1: bool,

    /// Record wall time in run.json.
    #[arg(long)]
    timing: bool,
}

fn parse_natural(s: &str) -> Result<u64, String> {
    s.replace('_', "").parse().map_err(|e| format!("`{s}`: {e}"))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let mut config = RunConfig::new(cli.limit, cli.out);
    config.segment_size = cli.segment_size;
    config.workers = cli.workers;
    config.checkpoints = cli.checkpoints;
    config.fit_options = FitOptions::default().with_weighting(cli.weighting.into());
    config.external = cli.external;
    config.emit_raw_counts = cli.raw_counts;
    config.verify_published = cli.verify_table1;
    config.record_timing = cli.timing;

    let report = match run(&config) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("twinsep: {e}");
            return ExitCode::FAILURE;
        }
    };

    println!("{:>10} {:>10} {:>10} {:>12} {:>12}", "pi2", "slope", "error", "pi1", "N");
    for row in &report.rows {
        println!(
            "{:>10} {:>10} {:>10} {:>12} {:>12}",
            row.pi2,
            fmt_opt(row.slope),
            fmt_opt(row.stat_error),
            row.pi1,
            row.n
        );
    }
    if let Some(model) = &report.model {
        println!("C = {:.4} ± {:.4} over {} points", model.c, model.c_err, model.points_used);
    }
    println!(
        "pi1 convention: {:?} ({}); {:.2}s",
        report.convention.convention, report.convention.source, report.wall_seconds
    );
    ExitCode::SUCCESS
}
