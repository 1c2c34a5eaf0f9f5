use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use viscontact::scenario::{run_scenario, study_scenario, GateOutcome, ScenarioConfig, StudyKind};

#[derive(Parser)]
#[command(name = "viscontact", version, about = "Viscoelastic frictional contact with wear: runs and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write trajectory, field, wear and condition files.
    Run {
        config: PathBuf,
        /// Output directory, overriding the environment and the scenario.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study in the time step or the mesh size.
    Study {
        config: PathBuf,
        #[arg(long = "type", value_enum)]
        kind: Kind,
        /// Number of step counts or meshes, at least 3.
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        levels: u32,
        /// Report observed orders without applying thresholds.
        #[arg(long)]
        no_gate: bool,
        /// Run every level on one thread.
        #[arg(long)]
        single_thread: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the scenario with all defaults filled in.
    DumpConfig { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Time,
    Space,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> viscontact::error::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let dir = cfg.output_dir(out.as_deref());
            let s = run_scenario(&cfg, &dir)?;
            print!("{}", s.conditions);
            if !s.conditions.all_pass() {
                eprintln!("warning: some solvability conditions fail for this scenario");
            }
            println!("wrote {} files to {}", s.files.len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Study { config, kind, levels, no_gate, single_thread, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let dir = cfg.output_dir(out.as_deref());
            let kind = match kind {
                Kind::Time => StudyKind::Time,
                Kind::Space => StudyKind::Space,
            };
            let go = || study_scenario(&cfg, kind, levels as usize, !no_gate, !single_thread, &dir);
            let outcome = if single_thread {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(1)
                    .build()
                    .map_err(|e| viscontact::error::Error::InvalidInput(e.to_string()))?
                    .install(go)?
            } else {
                go()?
            };
            print!("{}", outcome.table.to_csv());
            Ok(match outcome.gate {
                GateOutcome::Passed(m) | GateOutcome::Informational(m) => {
                    println!("{m}");
                    ExitCode::SUCCESS
                }
                GateOutcome::Failed(m) => {
                    println!("{m}");
                    ExitCode::from(3)
                }
            })
        }
        Command::DumpConfig { config } => {
            println!("{}", ScenarioConfig::load(&config)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}
