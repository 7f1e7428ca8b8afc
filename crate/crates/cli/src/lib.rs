//! Experiment harness around `qfilter-core`: config files, sweeps and
//! CSV/JSON output.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;

use anyhow::Result;

pub use config::ExperimentConfig;
pub use output::{write_report, OutputPaths, Report};

/// Runs an experiment and returns its rows.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    Ok(match cfg {
        ExperimentConfig::Fig5(c) => Report::Fig5(experiments::run_fig5(c)?),
        ExperimentConfig::Fig6(c) => Report::Fig6(experiments::run_fig6(c)?),
        ExperimentConfig::Bounds(c) => Report::Bounds(experiments::run_bounds(c)?),
        ExperimentConfig::Table1(_) => Report::Table1(experiments::run_table1()?),
        ExperimentConfig::Tgate(c) => Report::Tgate(experiments::run_tgate(c)?),
        ExperimentConfig::Ccz(c) => Report::Ccz(experiments::run_ccz(c)?),
        ExperimentConfig::Run(c) => Report::Run(experiments::run_single(c)?),
    })
}

/// Runs an experiment and writes `<stem>.csv` and `<stem>.json` into `out_dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<OutputPaths> {
    let report = run(cfg)?;
    write_report(cfg, &report, out_dir)
}

/// Caps the global rayon pool from `QFILTER_THREADS` when it is set.
pub fn init_thread_pool() -> Result<()> {
    if let Ok(v) = std::env::var("QFILTER_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("QFILTER_THREADS={v:?} is not a positive integer"))?;
        if n == 0 {
            anyhow::bail!("QFILTER_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
