use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lglu::cli::{build_report, cmd_verify, instance_eggbox, InstanceConfig};
use lglu::Error;

#[derive(Parser)]
#[command(name = "lglu", version, about = "Explore semigroups of linear maps fixing a subspace")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every structural check and print one line per check.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// Largest semigroup order to enumerate.
        #[arg(long)]
        cap: Option<usize>,
        /// Largest generating-set size tried by the rank search.
        #[arg(long)]
        rank_cap: Option<usize>,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a Graphviz egg-box diagram of the Green's structure.
    Eggbox {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Write a JSON summary of the structure.
    Report {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        rank_cap: Option<usize>,
    },
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(Error::from)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Verify {
            instance,
            cap,
            rank_cap,
            out,
        } => {
            let cfg = InstanceConfig::load(&instance)?;
            let report = cmd_verify(&cfg, cfg.caps(cap, rank_cap)?)?;
            print!("{}", report.render_text());
            if let Some(out) = out {
                let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Internal(e.to_string()))?;
                write(&out, &json)?;
            }
            Ok(report.passed())
        }
        Command::Eggbox { instance, out, cap } => {
            let cfg = InstanceConfig::load(&instance)?;
            let caps = cfg.caps(cap, None)?;
            let e = cfg.instance()?.enumerate(caps.enumeration)?;
            write(&out, &instance_eggbox(&e)?)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Report {
            instance,
            out,
            cap,
            rank_cap,
        } => {
            let cfg = InstanceConfig::load(&instance)?;
            let report = build_report(&cfg.instance()?, cfg.caps(cap, rank_cap)?)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Internal(e.to_string()))?;
            write(&out, &json)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
