use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zapkit_cli::config::RunConfig;
use zapkit_cli::{run_to_files, Command as Cmd};

/// Composite-pulse engineering toolkit: gate construction, constraint
/// solving, noise Monte Carlo and benchmarking simulation.
#[derive(Parser)]
#[command(name = "zapkit", version, about)]
struct Cli {
    /// JSON config file (flat key-value RunConfig); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path (CSV/JSON/table depending on the command); stdout when
    /// omitted. Side artifacts (e.g. rb fit JSON) get a suffixed name.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Gate-error metric: raw | aligned.
    #[arg(long, global = true)]
    metric: Option<String>,
    /// Coherence preset: elsc-300k | elsc-4k | c12-300k | c12-4k.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Gate or gate-set name where a command needs one.
    #[arg(long, global = true)]
    gate: Option<String>,
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Gate-error landscape over (eps, eta) for a conditional gate.
    Landscape,
    /// Monte-Carlo EPG versus T2* for one or more gate sets.
    Sweep,
    /// Benchmarking decay run (Clifford, reference or repeated-gate).
    Rb,
    /// Solve the augmenting-pulse constraints.
    Solve,
    /// Error-derivative nulling report for a gate.
    Derivcheck,
    /// Simulated-vs-published summary table.
    Project,
    /// Protection-order table generated from derivative checks.
    ReportAppendix1,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> zapkit::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(&path.to_string_lossy())?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(metric) =parse_metric(&cli.metric)? {
        cfg.metric = metric;
    }
    if let Some(preset) = &cli.preset {
        cfg.preset = Some(preset.clone());
    }
    if let Some(gate) = &cli.gate {
        cfg.gate = gate.clone();
    }
    let cmd = match cli.command {
        Commands::Landscape => Cmd::Landscape,
        Commands::Sweep => Cmd::Sweep,
        Commands::Rb => Cmd::Rb,
        Commands::Solve => Cmd::Solve,
        Commands::Derivcheck => Cmd::Derivcheck,
        Commands::Project => Cmd::Project,
        Commands::ReportAppendix1 => Cmd::ReportAppendix1,
    };
    run_to_files(cmd, &cfg, cli.out.as_deref())
}

fn parse_metric(m: &Option<String>) -> zapkit::Result<Option<zapkit::Metric>> {
    Ok(match m.as_deref() {
        None => None,
        Some("raw") => Some(zapkit::Metric::Raw),
        Some("aligned") => Some(zapkit::Metric::Aligned),
        Some(other) => {
            return Err(zapkit::Error::InvalidConfig(format!("unknown metric '{other}'")))
        }
    })
}
