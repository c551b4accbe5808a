use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use unruh_sim::config::{self, ScenarioConfig};
use unruh_sim::output::write_outcome;
use unruh_sim::run::execute;
use unruh_sim::{presets, SimError};

#[derive(Parser)]
#[command(name = "unruh-sim", version, about = "Collective dynamics of accelerated two-level atoms")]
struct Cli {
    /// Reserved; the dynamics are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Base directory; the config's output_path is resolved against it.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check a scenario file without running it.
    Validate { config: PathBuf },
    /// Run a shipped preset, or print it with --print.
    Preset {
        /// One of: fig2, fig4, counter_wedge, bec_design.
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        print: bool,
    },
}

fn read_config(path: &Path) -> Result<ScenarioConfig, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(format!("reading {}", path.display()), e))?;
    config::load(&text).map_err(SimError::Config)
}

fn run_and_write(cfg: &ScenarioConfig, base: &Path) -> Result<(), SimError> {
    let start = Instant::now();
    let outcome = execute(cfg)?;
    let dir = base.join(&cfg.output_path);
    let written = write_outcome(&outcome, &dir)?;
    for r in &outcome.runs {
        let s = &r.summary;
        match s.emission_peak {
            Some((t, v)) => eprintln!(
                "[{}] P_tot(T) = {:.6}, R peak {:.6} at t = {:.3}",
                s.label, s.final_p_tot, v, t
            ),
            None => eprintln!("[{}] P_tot(T) = {:.6}, no interior R peak", s.label, s.final_p_tot),
        }
    }
    if let Some(m) = &outcome.mapping {
        for w in &m.warnings {
            eprintln!("warning: {w}");
        }
    }
    eprintln!(
        "wrote {} files to {} in {:.2?}",
        written.len(),
        dir.display(),
        start.elapsed()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Run { config, out } => run_and_write(&read_config(&config)?, &out),
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| SimError::io(format!("reading {}", config.display()), e))?;
            let diags = match config::parse(&text) {
                Ok(cfg) => config::validate(&cfg),
                Err(d) => d,
            };
            if diags.is_empty() {
                println!("{}: ok", config.display());
                Ok(())
            } else {
                Err(SimError::Config(diags))
            }
        }
        Command::Preset { name, out, print } => {
            if print {
                let text = presets::source(&name).ok_or_else(|| SimError::config("preset", format!("unknown preset {name:?}")))?;
                print!("{text}");
                return Ok(());
            }
            run_and_write(&presets::preset(&name)?, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
