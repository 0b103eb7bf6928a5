mod config;
mod recipes;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, ExperimentConfig};
use run::RunError;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

/// Reproducible simulation campaigns for measured surface codes.
#[derive(Parser)]
#[command(name = "surflearn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSVs plus a JSON manifest.
    Run {
        #[command(flatten)]
        source: Source,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config and print a resource estimate without running it.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// List the bundled recipes.
    ListRecipes,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Experiment file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Name of a bundled recipe.
    #[arg(long)]
    recipe: Option<String>,
}

fn load(source: &Source) -> Result<ExperimentConfig, ConfigError> {
    let text = match (&source.config, &source.recipe) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?,
        (None, Some(name)) => recipes::find(name)
            .ok_or_else(|| ConfigError::Invalid(format!("no recipe named {name:?}")))?
            .to_string(),
        (None, None) => unreachable!("clap requires one source"),
    };
    config::parse(&text)
}

fn config_exit(e: &ConfigError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        ConfigError::Invalid(_) => EXIT_CONFIG,
        ConfigError::Capacity(_) => EXIT_CAPACITY,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::ListRecipes => {
            for (name, text) in recipes::RECIPES {
                let desc = config::parse(text).map(|c| c.description).unwrap_or_default();
                println!("{name:<20} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { source } => {
            let cfg = match load(&source) {
                Ok(c) => c,
                Err(e) => return config_exit(&e),
            };
            match cfg.validate() {
                Ok(report) => {
                    println!("{report}");
                    println!("status: accepted");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    println!("status: rejected");
                    config_exit(&e)
                }
            }
        }
        Command::Run {
            source,
            seed,
            threads,
            out,
        } => {
            let mut cfg = match load(&source) {
                Ok(c) => c,
                Err(e) => return config_exit(&e),
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let dir = run::output_dir(&cfg, out);
            match run::run(&cfg, &dir, threads) {
                Ok(m) => {
                    for f in &m.files {
                        log::info!("wrote {} ({} rows)", dir.join(&f.path).display(), f.rows);
                    }
                    if m.failed.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("error: {} task(s) failed; see {}", m.failed.len(), dir.join("manifest.json").display());
                        ExitCode::from(EXIT_RUNTIME)
                    }
                }
                Err(RunError::Config(e)) => config_exit(&e),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_RUNTIME)
                }
            }
        }
    }
}
