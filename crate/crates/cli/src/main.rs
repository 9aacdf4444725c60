use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zinet::models::ModelFamily;
use zinet_cli::bench::{bench_csv, cmd_bench, BenchConfig};
use zinet_cli::commands::{
    cmd_aggregate, cmd_detect_blocks, cmd_fit, cmd_report, cmd_sample, parse_binning, AggregateConfig, FitConfig, ReportConfig,
};
use zinet_cli::error::{CliError, EXIT_OK, EXIT_USAGE};
use zinet_cli::fetch::{fetch_dataset, resolve_cache_dir};
use zinet_cli::input::{parse_window, BlocksSource, DataContext, GraphSource, InputFormat};
use zinet_cli::registry::Registry;

#[derive(Parser)]
#[command(name = "zinet", version, about = "Fit and compare zero-inflated multi-edge network models")]
struct Cli {
    /// TOML file whose [[dataset]] entries override or extend the built-in registry.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Download cache (default: $ZINET_CACHE_DIR, else the user cache directory).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input file, or dataset:NAME for a registry entry.
    #[arg(long)]
    input: String,
    /// auto, contact-log, edgelist or graph.
    #[arg(long, default_value = "auto")]
    format: InputFormat,
    /// Edge lists only: treat pairs as ordered.
    #[arg(long)]
    directed: bool,
    /// Edge lists only: allow self-loops.
    #[arg(long)]
    loops: bool,
    /// Contact logs only: keep records with t0 <= t < t1 (t0:t1).
    #[arg(long, value_parser = parse_window)]
    window: Option<(i64, i64)>,
}

impl InputArgs {
    fn source(&self) -> GraphSource {
        GraphSource {
            input: self.input.clone(),
            format: self.format,
            directed: self.directed,
            loops: self.loops,
            window: self.window,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Download registry datasets into the cache and print their paths.
    Fetch {
        names: Vec<String>,
        #[arg(long)]
        all: bool,
        /// Print the effective registry as TOML and exit.
        #[arg(long)]
        list: bool,
    },
    /// Aggregate input into graph.json and summary.json.
    Aggregate {
        #[command(flatten)]
        input: InputArgs,
        /// Also tabulate this many growing time prefixes into prefix.csv.
        #[arg(long, default_value_t = 0)]
        prefix_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one model family and write its JSON file.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        family: ModelFamily,
        /// Block file, `detect` or `single`.
        #[arg(long)]
        blocks: Option<BlocksSource>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Modularity resolution for --blocks detect.
        #[arg(long, default_value_t = 1.0)]
        resolution: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw realizations from a fitted model.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        realizations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare one or two fitted models with the observed graph.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        model: PathBuf,
        /// Second model for a side-by-side comparison.
        #[arg(long)]
        model_b: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        realizations: usize,
        /// default, unit, or lower bin edges such as 0,1,2,5,10.
        #[arg(long, default_value = "default")]
        bins: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time fits on random block-structured graphs and write bench.csv.
    Bench {
        #[arg(long)]
        family: ModelFamily,
        /// Node counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Block counts, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        block_counts: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        loops: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Modularity-based block detection; writes blocks.txt.
    DetectBlocks {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        resolution: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = DataContext { registry: cli.registry.clone(), cache_dir: cli.cache_dir.clone() };
    match cli.command {
        Command::Fetch { names, all, list } => {
            let registry = Registry::load(ctx.registry.as_deref())?;
            if list {
                print!("{}", registry.to_toml());
                return Ok(());
            }
            let wanted: Vec<String> =
                if all { registry.datasets.iter().map(|d| d.name.clone()).collect() } else { names };
            if wanted.is_empty() {
                return Err(CliError::Usage("name at least one dataset, or pass --all".into()));
            }
            let cache = resolve_cache_dir(ctx.cache_dir.as_deref());
            let mut first_error = None;
            for name in &wanted {
                match registry.get(name).and_then(|d| fetch_dataset(d, &cache)) {
                    Ok(path) => println!("{name}\t{}", path.display()),
                    Err(e) => {
                        eprintln!("error: {e}");
                        first_error.get_or_insert(e);
                    }
                }
            }
            first_error.map_or(Ok(()), Err)
        }
        Command::Aggregate { input, prefix_points, out } => {
            let summary = cmd_aggregate(&AggregateConfig { source: input.source(), prefix_points, out }, &ctx)?;
            println!(
                "N {}  M {}  m {}  d {:.6}  rho {:.6}  kurtosis {}",
                summary.n_nodes,
                summary.links,
                summary.multi_edges,
                summary.density,
                summary.rho,
                summary.excess_kurtosis.map_or_else(|| "n/a".to_owned(), |k| format!("{k:.4}"))
            );
            Ok(())
        }
        Command::Fit { input, family, blocks, seed, resolution, out } => {
            let cfg = FitConfig { source: input.source(), family, blocks, seed, resolution, out };
            print!("{}", cmd_fit(&cfg, &ctx)?.summary);
            Ok(())
        }
        Command::Sample { model, realizations, seed, out } => {
            let manifest = cmd_sample(&model, realizations, seed, &out)?;
            println!("{realizations} realization(s); manifest {}", manifest.display());
            Ok(())
        }
        Command::Report { input, model, model_b, seed, realizations, bins, out } => {
            parse_binning(&bins).map_err(CliError::Usage)?;
            let cfg = ReportConfig { source: input.source(), model_a: model, model_b, seed, realizations, bins, out };
            let outcome = cmd_report(&cfg, &ctx)?;
            print!("{}", outcome.text);
            println!("report {}\nhistogram {}", outcome.report_path.display(), outcome.csv_path.display());
            Ok(())
        }
        Command::Bench { family, sizes, block_counts, reps, seed, directed, loops, out } => {
            let cfg = BenchConfig { family, sizes, blocks: block_counts, reps, seed, directed, loops };
            let (rows, _) = cmd_bench(&cfg, &out)?;
            print!("{}", bench_csv(&rows));
            Ok(())
        }
        Command::DetectBlocks { input, seed, resolution, out } => {
            let (blocks, q) = cmd_detect_blocks(&input.source(), seed, resolution, &out, &ctx)?;
            println!("{} block(s), modularity {q:.6}; wrote {}", blocks.n_blocks(), out.join("blocks.txt").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
