//! Library surface of the `zapkit` command-line tool, exposed so the
//! commands can be driven directly from tests.

pub mod commands;
pub mod config;

use std::path::Path;

use commands::Artifacts;
use config::RunConfig;
use zapkit::Result;

/// The available subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Landscape,
    Sweep,
    Rb,
    Solve,
    Derivcheck,
    Project,
    ReportAppendix1,
}

impl Command {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "landscape" => Self::Landscape,
            "sweep" => Self::Sweep,
            "rb" => Self::Rb,
            "solve" => Self::Solve,
            "derivcheck" => Self::Derivcheck,
            "project" => Self::Project,
            "report-appendix1" => Self::ReportAppendix1,
            _ => return None,
        })
    }
}

/// Run a command against a validated configuration.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Artifacts> {
    match cmd {
        Command::Landscape => commands::cmd_landscape(cfg),
        Command::Sweep => commands::cmd_sweep_t2star(cfg),
        Command::Rb => commands::cmd_rb(cfg),
        Command::Solve => commands::cmd_solve(cfg),
        Command::Derivcheck => commands::cmd_derivcheck(cfg),
        Command::Project => commands::cmd_project(cfg),
        Command::ReportAppendix1 => commands::cmd_report_appendix1(cfg),
    }
}

/// Run a command and write its artifacts to `out` (primary) plus suffixed
/// side files; with no output path the artifacts go to stdout.
pub fn run_to_files(cmd: Command, cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let artifacts = run(cmd, cfg)?;
    match out {
        Some(path) => {
            write(path, &artifacts.primary)?;
            for (suffix, text) in &artifacts.extra {
                let side = path.with_file_name(format!(
                    "{}{}",
                    path.file_name().unwrap_or_default().to_string_lossy(),
                    suffix
                ));
                write(&side, text)?;
            }
        }
        None => {
            print!("{}", artifacts.primary);
            for (_, text) in &artifacts.extra {
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| zapkit::Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))
}
