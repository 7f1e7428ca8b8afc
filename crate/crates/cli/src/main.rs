use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qfilter::config::{ExperimentConfig, Fig6Variant};

#[derive(Parser)]
#[command(name = "qfilter", version, about = "Quantum channel filter experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correction filter fidelity over a (pc, pt) grid.
    Fig5(Common),
    /// Two-ancilla filter on brickwork circuits over depth and rate.
    Fig6 {
        #[command(flatten)]
        common: Common,
        /// same-noise, clean-filter-partial or noiseless-filter
        #[arg(long)]
        variant: Option<String>,
    },
    /// Exact bound and counting checks.
    Bounds(Common),
    /// Fault propagation through the single-qubit filters.
    Table1(Common),
    /// T-gate noise biasing.
    Tgate(Common),
    /// CCZ partial purification.
    Ccz(Common),
    /// One circuit, original and filtered (config required).
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; the built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(name: &str, common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default_for(name)?,
    };
    if cfg.name() != name {
        bail!("config is for {:?}, not {name:?}", cfg.name());
    }
    cfg.override_with(common.shots, common.seed)?;
    Ok(cfg)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    qfilter::init_thread_pool()?;
    let (name, common, variant) = match &cli.command {
        Command::Fig5(c) => ("fig5", c, None),
        Command::Fig6 { common, variant } => ("fig6", common, variant.as_deref()),
        Command::Bounds(c) => ("bounds", c, None),
        Command::Table1(c) => ("table1", c, None),
        Command::Tgate(c) => ("tgate", c, None),
        Command::Ccz(c) => ("ccz", c, None),
        Command::Run(c) => ("run", c, None),
    };
    let mut cfg = load(name, common)?;
    if let (ExperimentConfig::Fig6(c), Some(v)) = (&mut cfg, variant) {
        c.variant = Fig6Variant::parse(v)?;
    }
    let paths = qfilter::run_to_dir(&cfg, &common.out)?;
    println!("{}", paths.csv.display());
    println!("{}", paths.json.display());
    Ok(())
}
