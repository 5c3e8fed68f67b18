use std::path::PathBuf;
use std::process::ExitCode;

use aleflow_cli::{execute, parse_config, scenario, RunConfig, SCENARIOS};
use clap::{Parser, Subcommand};

/// Ricci–DeTurck flow lab on ALE Ricci-flat backgrounds.
#[derive(Parser)]
#[command(name = "aleflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a `key = value` configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `out_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset.
    Scenario {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the presets.
    ListScenarios,
    /// Print a preset as a configuration file.
    ShowScenario { name: String },
}

fn preset(name: &str) -> Result<RunConfig, u8> {
    scenario(name).ok_or_else(|| {
        eprintln!("error: unknown scenario `{name}` (see `aleflow list-scenarios`)");
        2
    })
}

fn run(mut c: RunConfig, out: Option<PathBuf>) -> u8 {
    if let Some(o) = out {
        c.out_dir = o;
    }
    match execute(&c) {
        Ok(outcome) => {
            let paths = match outcome.report.write(&c.out_dir) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: writing {}: {e}", c.out_dir.display());
                    return 1;
                }
            };
            print!("{}", outcome.report.with_csv_keys().render());
            for p in paths {
                println!("wrote {}", p.display());
            }
            outcome.exit_code() as u8
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => match std::fs::read_to_string(&config) {
            Err(e) => {
                eprintln!("error: reading {}: {e}", config.display());
                2
            }
            Ok(text) => match parse_config(&text) {
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    2
                }
                Ok(c) => run(c, out),
            },
        },
        Command::Scenario { name, out } => match preset(&name) {
            Ok(c) => run(c, out),
            Err(code) => code,
        },
        Command::ListScenarios => {
            for (name, summary) in SCENARIOS {
                println!("{name:<16} {summary}");
            }
            0
        }
        Command::ShowScenario { name } => match preset(&name) {
            Ok(c) => {
                print!("{}", aleflow_cli::render(&c));
                0
            }
            Err(code) => code,
        },
    };
    ExitCode::from(code)
}
