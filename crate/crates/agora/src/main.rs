use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use agora::cli::{cmd_gen, cmd_report, cmd_run, GenOptions, ReportFormat, ReportOptions, RunOptions};

#[derive(Parser)]
#[command(
    name = "agora",
    version,
    about = "Deterministic data-marketplace simulator and acquisition-strategy benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bundle of market files plus a sealed manifest.
    Gen {
        /// Base seed; all market seeds derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = "markets")]
        out: PathBuf,
        /// Number of market instances.
        #[arg(long, default_value_t = 5)]
        markets: usize,
        /// Providers per market.
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Feature dimension.
        #[arg(long, default_value_t = 768)]
        dim: usize,
        /// Categories in the data pool.
        #[arg(long, default_value_t = 21)]
        categories: usize,
        /// Cluster-center spread.
        #[arg(long, default_value_t = 4.0)]
        separation: f64,
        /// Within-cluster standard deviation.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        /// Acquirer budget in dollars.
        #[arg(long, default_value_t = 150.0)]
        budget: f64,
        /// Sticker price of each full dataset in dollars.
        #[arg(long, default_value_t = 100.0)]
        total_price: f64,
        /// Samples each provider shares publicly.
        #[arg(long, default_value_t = 5)]
        n_shared: usize,
        /// Smallest provider dataset.
        #[arg(long, default_value_t = 800)]
        size_min: usize,
        /// Largest provider dataset.
        #[arg(long, default_value_t = 2000)]
        size_max: usize,
        /// Acquirer evaluation-set size.
        #[arg(long, default_value_t = 500)]
        acquirer_size: usize,
        /// Write only the public sections.
        #[arg(long)]
        public_only: bool,
        /// Regenerate from an existing manifest; other flags are ignored.
        #[arg(long)]
        from_manifest: Option<PathBuf>,
    },
    /// Run one strategy against a market bundle.
    Run {
        /// Market directory (or a single market file).
        #[arg(long, default_value = "markets")]
        markets: PathBuf,
        /// Output directory for decision/score files; defaults to the
        /// market directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Strategy: single:<i>, all, percent:<p>, rfe, cofr, lp:1, lp:2, lp:inf.
        #[arg(long)]
        strategy: String,
        /// Accuracy weight in the score.
        #[arg(long, default_value_t = 0.98)]
        alpha: f64,
        /// Features kept by the RFE strategy.
        #[arg(long, default_value_t = 5)]
        rfe_k: usize,
        /// Unit-cost skip threshold as a multiple of the market median.
        #[arg(long, default_value_t = 1.5)]
        skip_factor: f64,
        /// Split the percent-strategy budget by the full provider count
        /// instead of the remaining one.
        #[arg(long)]
        percent_split_by_total: bool,
    },
    /// Aggregate score files into a strategy-by-market table.
    Report {
        /// Directory containing score_*.json files.
        #[arg(long, default_value = "markets")]
        scores: PathBuf,
        /// Write the table here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Table format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen {
            seed,
            out,
            markets,
            k,
            dim,
            categories,
            separation,
            noise,
            budget,
            total_price,
            n_shared,
            size_min,
            size_max,
            acquirer_size,
            public_only,
            from_manifest,
        } => {
            let opts = GenOptions {
                seed,
                out,
                count: markets,
                k,
                dim,
                categories,
                separation,
                noise,
                budget,
                total_price,
                n_shared,
                size_min,
                size_max,
                acquirer_size,
                public_only,
                from_manifest,
            };
            cmd_gen(&opts).map(|paths| {
                for p in &paths {
                    println!("wrote {}", p.display());
                }
            })
        }
        Command::Run {
            markets,
            out,
            strategy,
            alpha,
            rfe_k,
            skip_factor,
            percent_split_by_total,
        } => {
            let opts = RunOptions {
                markets,
                out,
                strategy,
                alpha,
                rfe_k,
                skip_factor,
                percent_split_by_total,
            };
            cmd_run(&opts).map(|scores| {
                for (index, score) in &scores {
                    println!(
                        "market {index}: accuracy {:.4}, cost ${:.3}, score {:.4}",
                        score.accuracy, score.cost_dollars, score.score
                    );
                }
                if scores.is_empty() {
                    println!("decisions written (public-only bundle, no scores)");
                }
            })
        }
        Command::Report {
            scores,
            out,
            format,
        } => {
            let opts = ReportOptions {
                scores,
                out,
                format: match format {
                    Format::Csv => ReportFormat::Csv,
                    Format::Md => ReportFormat::Markdown,
                },
            };
            cmd_report(&opts).map(|table| print!("{table}"))
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
