//! Flag surface of `panda-lab`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "panda-lab",
    version,
    about = "Low-power neighbor-discovery lab: configuration search, event simulation, \
             baselines, and reference tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve the configuration search for one (nodes, budget) point and
    /// report rate, upper bound, and optional Monte-Carlo reference.
    Optimize(OptimizeArgs),
    /// Run one scenario file through the event simulator.
    Simulate(SimulateArgs),
    /// Grid evaluation over nodes x budgets: analytical rate, upper bound,
    /// ratio, and (optionally) a simulated rate per cell.
    Sweep(SweepArgs),
    /// Simulate the protocol against the slotted baselines on one clique.
    Compare(CompareArgs),
    /// Print the voltage-feedback sleep law for a budget estimate.
    PandaD(PandaDArgs),
    /// Optimize the preamble variant (exponential or deterministic).
    Preamble(PreambleArgs),
    /// Emit the reference tables and self-check them against the bundled
    /// expected values.
    Tables(TablesArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct OptimizeArgs {
    /// Network size (clique).
    #[arg(long)]
    pub nodes: u32,
    /// Power budget per node (mW).
    #[arg(long)]
    pub budget: f64,
    /// Radio profile file; defaults to the bundled reference radio.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Monte-Carlo oracle sample count (0 skips the oracle).
    #[arg(long, default_value_t = 0)]
    pub mc_samples: u64,
    /// RNG seed; required whenever --mc-samples > 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Radio profile overriding the scenario's [radio] section.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Virtual runtime.
    #[arg(long)]
    pub duration_hours: f64,
    /// Write the discovery log (CSV) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json: metrics summary on stdout. csv: discovery log on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Comma-separated network sizes.
    #[arg(long, default_value = "2,5,10,25")]
    pub nodes: String,
    /// Comma-separated budgets (mW).
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
    pub budgets: String,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Master seed; per-cell seeds derive from it. Required when simulating.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulate each cell this long to fill the sim_rate_per_s column;
    /// omit to sweep analytically only.
    #[arg(long)]
    pub duration_hours: Option<f64>,
    /// Worker threads; falls back to PANDA_LAB_JOBS, then all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 5)]
    pub nodes: u32,
    #[arg(long, default_value = "0.15,0.3,0.5")]
    pub budgets: String,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub duration_hours: f64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PandaDArgs {
    /// Budget estimate anchoring the law at 3.8 V (mW).
    #[arg(long)]
    pub budget_est: f64,
    /// Listen window (ms); defaults to the pairwise search optimum.
    #[arg(long)]
    pub listen: Option<f64>,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PreambleModeArg {
    Exp,
    Det,
}

#[derive(Args)]
pub struct PreambleArgs {
    #[arg(long, value_enum)]
    pub mode: PreambleModeArg,
    #[arg(long)]
    pub nodes: u32,
    /// Per-time listening cost constant T.
    #[arg(long)]
    pub t_ratio: f64,
    /// Per-preamble-time transmit cost constant F.
    #[arg(long)]
    pub f_ratio: f64,
    /// Budget constant chi of the constraint.
    #[arg(long)]
    pub chi: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TablesArgs {
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Directory receiving tables3.csv, appendixA.csv, appendixB.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
