//! `grm`: PageRank, reduced Google matrices and their analysis products
//! from plain edge-list files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grm_core::Component;

mod commands;
mod config;

use config::Common;

#[derive(Debug, Parser)]
#[command(name = "grm", version, about = "Google matrix and reduced Google matrix analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank every node by PageRank; optionally rank a subset locally.
    Pagerank {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Subset file; adds a local-rank CSV next to `--out`.
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        keep_self_loops: bool,
        /// Rank CSV to write.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the reduced Google matrix bundle of a subset.
    Reduce {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        subset: PathBuf,
        #[arg(long)]
        keep_self_loops: bool,
        /// Provenance tag stored in meta.json; defaults to the edge file stem.
        #[arg(long)]
        edition: Option<String>,
        /// Compare against the dense oracle (networks up to 2000 nodes).
        #[arg(long)]
        verify: bool,
        /// Bundle directory to write.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Aggregate per-edition rank CSVs into Θ-scores.
    Theta {
        /// Rank CSVs (with `K` and `title` columns), one per edition.
        #[arg(long, num_args = 1.., required = true)]
        tables: Vec<PathBuf>,
        /// Edition tags, in table order; defaults to the file stems.
        #[arg(long, num_args = 1..)]
        editions: Vec<String>,
        #[arg(long, default_value_t = grm_core::analysis::DEFAULT_THETA_CUTOFF)]
        cutoff: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Friendship network of a bundle as GEXF and DOT.
    Friends {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = grm_core::analysis::DEFAULT_TOP_K)]
        top_k: usize,
        /// GR, Grr, Gpr, Gqr, Gqrd, Gqrnd or Grr+Gqrnd.
        #[arg(long)]
        component: Option<Component>,
        /// Subset-format file of leaders; switches to the friends-of-friends
        /// closure (default component Gqrnd).
        #[arg(long)]
        leaders: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Equal-weight average of several bundles, with its PageRank.
    Average {
        #[arg(long, num_args = 1.., required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// PageRank sensitivity of a bundle to link-weight variations.
    Sensitivity {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = grm_core::analysis::DEFAULT_DELTA, allow_hyphen_values = true)]
        delta: f64,
        /// Source of a single varied link.
        #[arg(long, requires = "to", conflicts_with_all = ["ps", "cs"])]
        from: Option<String>,
        /// Destination of a single varied link.
        #[arg(long, requires = "from")]
        to: Option<String>,
        /// Column entries of the two-way grid (subset-format file).
        #[arg(long, requires = "cs")]
        ps: Option<PathBuf>,
        /// Row entries of the two-way grid (subset-format file).
        #[arg(long, requires = "ps")]
        cs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grm: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
