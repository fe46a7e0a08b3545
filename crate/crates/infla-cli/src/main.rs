//! `infla` — reproducible panel analyses from CSV level series.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use infla_cli::commands;
use infla_cli::config::ConfigFile;
use infla_cli::errors::CliResult;

#[derive(Parser)]
#[command(
    name = "infla",
    version,
    about = "Trajectory similarity, spectral similarity counts, lead-lag centrality, \
             distributional robustness, sector correlation and rolling constrained \
             portfolio optimization over CSV level panels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Plain-text `key = value` configuration file; command-line flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for this run
    #[arg(long)]
    out: Option<PathBuf>,
    /// Panel frequency: monthly or daily
    #[arg(long)]
    frequency: Option<String>,
    /// Missing-cell policy: reject or drop-row
    #[arg(long)]
    missing: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Distance matrix, hierarchical clustering and eigenspectrum of
    /// normalized return trajectories
    Trajectory {
        #[command(flatten)]
        common: CommonArgs,
        /// Level panel CSV (e.g. CPI index levels per country)
        #[arg(long)]
        cpi: Option<PathBuf>,
        /// Cluster linkage: average, single or complete
        #[arg(long)]
        linkage: Option<String>,
        /// Eigenvalue-magnitude threshold for the similarity count
        #[arg(long)]
        delta: Option<f64>,
        /// Also cut the dendrogram into this many clusters
        #[arg(long)]
        clusters: Option<usize>,
        /// Also emit the eigenvector matrix
        #[arg(long)]
        eigenvectors: bool,
    },
    /// Rolling trend slopes, lead-lag offsets and centrality scores
    Centrality {
        #[command(flatten)]
        common: CommonArgs,
        /// Level panel CSV (e.g. CPI index levels per country)
        #[arg(long)]
        cpi: Option<PathBuf>,
        /// Rolling regression window in rows
        #[arg(long)]
        window: Option<usize>,
        /// Largest offset magnitude searched
        #[arg(long)]
        phi_max: Option<usize>,
        /// Also run the analysis separately before and after this date
        #[arg(long)]
        split_date: Option<String>,
    },
    /// Decile-conditioned return distributions and their distance
    Robustness {
        #[command(flatten)]
        common: CommonArgs,
        /// Driver level panel CSV (e.g. CPI index levels)
        #[arg(long)]
        inflation: Option<PathBuf>,
        /// Target level panel CSV (e.g. equity index levels), same
        /// entities and dates
        #[arg(long)]
        equity: Option<PathBuf>,
    },
    /// Rolling intra-sector correlation and window averages
    Sectorcorr {
        #[command(flatten)]
        common: CommonArgs,
        /// Constituent level panel CSV
        #[arg(long)]
        returns: Option<PathBuf>,
        /// `entity,sector` CSV mapping constituents to sectors
        #[arg(long)]
        sector_map: Option<PathBuf>,
        /// Rolling window in rows
        #[arg(long)]
        window: Option<usize>,
        /// Average from this date (default: first window end)
        #[arg(long)]
        from: Option<String>,
        /// Average up to this date inclusive (default: last window end)
        #[arg(long)]
        to: Option<String>,
    },
    /// Rolling constrained ratio maximization with a fixed core weight
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// Asset level panel CSV; the first column is the core asset
        #[arg(long)]
        assets: Option<PathBuf>,
        /// Fixed weight of the core asset
        #[arg(long)]
        core_weight: Option<f64>,
        /// Lower bound for every free asset weight
        #[arg(long)]
        lo: Option<f64>,
        /// Upper bound for every free asset weight
        #[arg(long)]
        hi: Option<f64>,
        /// Risk-free rate subtracted from the portfolio return
        #[arg(long)]
        risk_free: Option<f64>,
        /// Estimation window in rows
        #[arg(long)]
        window: Option<usize>,
        /// Ratio denominator: variance or stdev
        #[arg(long)]
        objective: Option<String>,
        /// Comma-separated core weights to sweep, e.g. 0.2,0.3,0.4,0.5
        #[arg(long)]
        sweep: Option<String>,
        /// Solve every window from scratch instead of warm-starting
        #[arg(long)]
        cold_start: bool,
    },
    /// Write the synthetic fixture panels
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// Seed for the fixture generator
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Summarize the manifests and outputs of previous runs
    Report {
        #[command(flatten)]
        common: CommonArgs,
        /// Directory containing run outputs
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("infla: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn load_config(common: &CommonArgs) -> CliResult<ConfigFile> {
    match &common.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::empty()),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Trajectory { common, cpi, linkage, delta, clusters, eigenvectors } => {
            let config = load_config(&common)?;
            let params = commands::trajectory::Params::resolve(
                &config,
                cpi,
                common.out,
                common.frequency,
                common.missing,
                linkage,
                delta,
                clusters,
                eigenvectors,
            )?;
            commands::trajectory::run(&params)
        }
        Command::Centrality { common, cpi, window, phi_max, split_date } => {
            let config = load_config(&common)?;
            let params = commands::centrality::Params::resolve(
                &config,
                cpi,
                common.out,
                common.frequency,
                common.missing,
                window,
                phi_max,
                split_date,
            )?;
            commands::centrality::run(&params)
        }
        Command::Robustness { common, inflation, equity } => {
            let config = load_config(&common)?;
            let params = commands::robustness::Params::resolve(
                &config,
                inflation,
                equity,
                common.out,
                common.frequency,
                common.missing,
            )?;
            commands::robustness::run(&params)
        }
        Command::Sectorcorr { common, returns, sector_map, window, from, to } => {
            let config = load_config(&common)?;
            let params = commands::sectorcorr::Params::resolve(
                &config,
                returns,
                sector_map,
                common.out,
                common.frequency,
                common.missing,
                window,
                from,
                to,
            )?;
            commands::sectorcorr::run(&params)
        }
        Command::Optimize {
            common,
            assets,
            core_weight,
            lo,
            hi,
            risk_free,
            window,
            objective,
            sweep,
            cold_start,
        } => {
            let config = load_config(&common)?;
            let params = commands::optimize::Params::resolve(
                &config,
                assets,
                common.out,
                common.frequency,
                common.missing,
                core_weight,
                lo,
                hi,
                risk_free,
                window,
                objective,
                sweep,
                cold_start,
            )?;
            commands::optimize::run(&params)
        }
        Command::Synth { common, seed } => {
            let config = load_config(&common)?;
            let params = commands::synth_cmd::Params::resolve(&config, common.out, seed)?;
            commands::synth_cmd::run(&params)
        }
        Command::Report { common, dir } => {
            let config = load_config(&common)?;
            let params = commands::report::Params::resolve(&config, dir, common.out)?;
            commands::report::run(&params)
        }
    }
}
