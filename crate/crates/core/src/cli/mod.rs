//! The `purify` command-line tool.
//!
//! Each subcommand writes one or more CSV tables into `--out`, each with a
//! sibling JSON manifest. Work runs on a rayon pool of `--workers` threads;
//! results do not depend on that number.

mod analytic;
mod figures;
mod runs;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::ensemble::SimConfig;
use crate::error::{invalid, Result};
use crate::output::{Manifest, OutputSet};
use crate::protocols::{FeedbackModel, ProtocolKind};

pub use analytic::{AnalyticArgs, Quantity};
pub use figures::{Figure1Args, Figure23Args};
pub use runs::{FptArgs, PurityArgs};

#[derive(Debug, Parser)]
#[command(name = "purify", version, about = "Purification of a continuously measured qubit: Monte Carlo ensembles and closed forms")]
pub struct Cli {
    /// Directory for CSV tables and manifests (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity distributions at fixed times, Monte Carlo against the closed form.
    Figure1(Figure1Args),
    /// First-passage times and feedback/no-feedback ratios over a sweep of ε.
    #[command(name = "figure2-3")]
    Figure23(Figure23Args),
    /// First-passage statistics for one ε and protocol.
    Fpt(FptArgs),
    /// Ensemble means of z, |z|, purity and ln s over time.
    Purity(PurityArgs),
    /// Tabulates a closed-form quantity over a grid.
    Analytic(AnalyticArgs),
}

/// Monte Carlo settings shared by the ensemble subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    /// Number of trajectories.
    #[arg(long, default_value_t = SimConfig::DEFAULT_N_TRAJ)]
    pub n_traj: usize,
    /// Integrator step.
    #[arg(long, default_value_t = SimConfig::DEFAULT_DT)]
    pub dt: f64,
    /// Master seed; trajectory i uses stream i of this seed.
    #[arg(long, default_value_t = SimConfig::DEFAULT_SEED)]
    pub seed: u64,
    /// Simulation horizon; defaults depend on the subcommand.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Feedback model when the protocol is `jacobs`: `ideal` or `sampled`.
    #[arg(long, default_value_t = FeedbackModel::Ideal)]
    pub feedback: FeedbackModel,
}

impl EnsembleArgs {
    fn config(&self, protocol: ProtocolKind, epsilon: f64, default_t_max: f64) -> Result<SimConfig> {
        let cfg = SimConfig::new(protocol, epsilon)?
            .with_n_traj(self.n_traj)
            .with_dt(self.dt)
            .with_seed(self.seed)
            .with_feedback(self.feedback)
            .with_t_max(self.t_max.unwrap_or(default_t_max));
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the parsed command line, returning the CSV files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(invalid("workers", "need at least one worker"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    pool.install(|| {
        let name = command_name(&cli.command);
        let mut out = OutputSet::new(&cli.out, name);
        let mut manifest = Manifest::default();
        manifest.insert("out", cli.out.display().to_string());
        manifest.insert("workers", cli.workers.map_or(serde_json::Value::Null, |w| w.into()));
        match &cli.command {
            Command::Figure1(a) => figures::figure1(a, &mut out, &mut manifest)?,
            Command::Figure23(a) => figures::figure2_3(a, &mut out, &mut manifest)?,
            Command::Fpt(a) => runs::fpt(a, &mut out, &mut manifest)?,
            Command::Purity(a) => runs::purity(a, &mut out, &mut manifest)?,
            Command::Analytic(a) => analytic::analytic(a, &mut out, &mut manifest)?,
        }
        out.write(&manifest)
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Figure1(_) => "figure1",
        Command::Figure23(_) => "figure2-3",
        Command::Fpt(_) => "fpt",
        Command::Purity(_) => "purity",
        Command::Analytic(_) => "analytic",
    }
}

/// `1e-6` → `1e-6`, `1.72694` → `1.72694`: numbers as they appear in file names.
fn tag(v: f64) -> String {
    crate::output::format_number(v)
}

fn record_config(manifest: &mut Manifest, cfg: &SimConfig) {
    manifest.extend_from(cfg);
}
