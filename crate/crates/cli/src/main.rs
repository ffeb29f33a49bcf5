use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphene_dg::commands::{self, Options};
use graphene_dg_core::convergence::Axis;

#[derive(Parser)]
#[command(name = "graphene-dg", version, about = "Kinetic DG simulation of charge transport in graphene")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write frames, snapshots and metadata.
    Run(Common),
    /// Refine one mesh axis and report error norms and rates.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: AxisArg,
    },
    /// Write the precomputed scattering tables.
    DumpTables(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset: suspended, gfet or custom.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Frozen field strength in V/μm pushing electrons toward x = L.
    #[arg(long, allow_hyphen_values = true)]
    frozen_field: Option<f64>,
    /// Suppress progress output.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Eps,
    Theta,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Eps => Axis::Energy,
            AxisArg::Theta => Axis::Angle,
        }
    }
}

impl From<Common> for Options {
    fn from(c: Common) -> Self {
        Options {
            config: c.config,
            scenario: c.scenario,
            out: c.out,
            frozen_field: c.frozen_field,
            quiet: c.quiet,
        }
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(c) => commands::run(&c.into()),
        Command::Converge { common, axis } => commands::converge(&common.into(), axis.into()),
        Command::DumpTables(c) => commands::dump_tables(&c.into()),
    }
}
