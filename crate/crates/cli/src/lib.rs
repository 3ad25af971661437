//! The `hoi` experiment runner: argument parsing, configuration merging and
//! the subcommands that write result tables.

mod commands;
pub mod config;
pub mod error;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Config, NmiNormName, ProblemName};
use error::{CliError, EXIT_CONFIG};
use output::OutputDir;

/// Persistence analysis and prediction for higher-order interactions in
/// temporal hypergraphs.
#[derive(Debug, Parser)]
#[command(name = "hoi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Overrides,
}

/// Command-line values take precedence over the configuration file.
#[derive(Debug, clap::Args)]
struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset name; files are read from DATA_DIR/NAME/NAME-*.txt.
    #[arg(long, global = true)]
    dataset: Option<String>,
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Explicit path prefix of the three input files.
    #[arg(long, global = true)]
    prefix: Option<PathBuf>,
    /// Raw timestamp ticks per time unit.
    #[arg(long, global = true)]
    unit_width: Option<i64>,
    /// Drop hyperedges with more nodes than this.
    #[arg(long, global = true)]
    max_size: Option<usize>,
    /// HOI sizes, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Observation period Ts.
    #[arg(long, global = true)]
    ts: Option<u32>,
    /// Persistence horizon Tp.
    #[arg(long, global = true)]
    tp: Option<u32>,
    /// Window for persistence distributions.
    #[arg(long, global = true)]
    window: Option<u32>,
    /// Features cover every unit up to the end of the observation period.
    #[arg(long, global = true)]
    include_past: bool,
    /// Features include the first-appearance unit.
    #[arg(long, global = true)]
    include_first: bool,
    /// Sample at most this many HOIs per size.
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Leave the generation time out of output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// No progress summaries on stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[arg(long, global = true)]
    pagerank_weighted: Option<bool>,
    #[arg(long, global = true, value_enum)]
    nmi_norm: Option<NmiNormName>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Prediction problems, comma separated.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    problem: Option<Vec<ProblemName>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and canonicalize a dataset.
    Ingest,
    /// Persistence distributions and power-law fits per HOI size.
    PersistDist,
    /// Feature matrices with persistence targets.
    Export,
    /// Pearson and NMI between each feature and persistence.
    Correlate,
    /// Compare mean, linear and random-forest predictors.
    Predict {
        /// Write each trained forest as JSON.
        #[arg(long)]
        dump_model: bool,
    },
    /// Gini importance of each feature.
    Importance,
    /// Backward feature elimination.
    Select,
    /// Prediction quality over observation periods.
    Periods,
    /// Persistence of the real data against randomized hypergraphs.
    Nullcmp {
        /// Randomized replicates per mode.
        #[arg(long)]
        null_seeds: Option<u64>,
        /// Write each randomized hypergraph.
        #[arg(long)]
        dump: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::PersistDist => "persist-dist",
            Command::Export => "export",
            Command::Correlate => "correlate",
            Command::Predict { .. } => "predict",
            Command::Importance => "importance",
            Command::Select => "select",
            Command::Periods => "periods",
            Command::Nullcmp { .. } => "nullcmp",
        }
    }
}

fn resolve(cli: &Cli) -> hoi_core::Result<Config> {
    let o = &cli.opts;
    let mut cfg = match &o.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(v) = &o.dataset {
        cfg.dataset.name = v.clone();
    }
    if let Some(v) = &o.data_dir {
        cfg.dataset.data_dir = v.clone();
    }
    if let Some(v) = &o.prefix {
        cfg.dataset.prefix = Some(v.clone());
    }
    if let Some(v) = o.unit_width {
        cfg.dataset.unit_width = v;
    }
    if let Some(v) = o.max_size {
        cfg.dataset.max_size = v;
    }
    if let Some(v) = &o.k {
        cfg.k = v.clone();
    }
    if let Some(v) = o.ts {
        cfg.observe = v;
    }
    if let Some(v) = o.tp {
        cfg.horizon = v;
    }
    if let Some(v) = o.window {
        cfg.window = v;
    }
    cfg.include_past |= o.include_past;
    cfg.include_first |= o.include_first;
    if o.cap.is_some() {
        cfg.cap = o.cap;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.pagerank_weighted {
        cfg.pagerank.weighted = v;
    }
    if let Some(v) = o.nmi_norm {
        cfg.correlate.nmi_norm = v;
    }
    if let Some(v) = &o.problem {
        cfg.problems = v.clone();
    }
    if let Command::Nullcmp { null_seeds, dump } = &cli.command {
        if let Some(n) = null_seeds {
            cfg.nullmodel.seeds = *n;
        }
        cfg.nullmodel.dump |= dump;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &Config) -> Result<(), CliError> {
    let out = OutputDir::create(
        &cli.opts.out,
        cli.command.name(),
        cfg,
        !cli.opts.no_timestamp,
        cli.opts.quiet,
    )?;
    match &cli.command {
        Command::Ingest => commands::ingest(cfg, &out),
        Command::PersistDist => commands::persist_dist(cfg, &out),
        Command::Export => commands::export(cfg, &out),
        Command::Correlate => commands::correlate(cfg, &out),
        Command::Predict { dump_model } => commands::predict(cfg, &out, *dump_model),
        Command::Importance => commands::importance(cfg, &out),
        Command::Select => commands::select(cfg, &out),
        Command::Periods => commands::periods(cfg, &out),
        Command::Nullcmp { .. } => commands::nullcmp(cfg, &out),
    }
}

/// Parses `args` (program name first) and runs the selected subcommand.
/// Diagnostics go to stderr; the return value is the process exit status.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            let e = CliError::from(e);
            eprintln!("hoi: {e}");
            return e.exit_code();
        }
    };
    if let Some(n) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("hoi: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(&cli, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hoi: {e}");
            e.exit_code()
        }
    }
}
