use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bec_qubit_lab::presets::{preset, PRESETS};
use bec_qubit_lab::{parse_config, run, validate, CliError, RunConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bec-qubit-lab", version, about = "Run condensate qubit simulations from config files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts to a directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a config without running it; prints the canonical form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the bundled presets, or print one.
    Presets { name: Option<String> },
}

fn load(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            validate(&cfg)?;
            let start = Instant::now();
            let summary = run(&cfg, &out)?;
            eprintln!(
                "{}: wrote {} files to {} in {:.2} s",
                summary.experiment,
                summary.files.len(),
                out.display(),
                start.elapsed().as_secs_f64()
            );
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            validate(&cfg)?;
            print!("{}", cfg.serialize());
        }
        Command::Presets { name: None } => {
            for (name, _) in PRESETS {
                println!("{name}.cfg");
            }
        }
        Command::Presets { name: Some(name) } => match preset(&name) {
            Some(text) => print!("{text}"),
            None => return Err(CliError::Config(format!("unknown preset '{name}'"))),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors count as config errors; clap would otherwise exit with 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
