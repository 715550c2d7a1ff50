use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use boussinesq_cli::{list_experiments, replot, run, ExitStatus, DEFAULT_OUT_DIR, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "boussinesq", version, about = "Decay-rate experiments for the dissipative Boussinesq equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiments named in a configuration file.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
        out: PathBuf,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List experiment ids and what each verifies.
    List,
    /// Regenerate SVG plots from a series table.
    Replot { series: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let status = match cli.command {
        Command::List => {
            print!("{}", list_experiments());
            ExitStatus::Passed
        }
        Command::Replot { series } => match replot(&series) {
            Ok(paths) => {
                for p in paths {
                    println!("{}", p.display());
                }
                ExitStatus::Passed
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_status()
            }
        },
        Command::Run { config, out, threads } => match run(&config, &out, threads) {
            Ok(report) => {
                for e in &report.experiments {
                    for v in &e.verdicts {
                        println!("{} {} {}: {}", v.status, v.criterion, e.id, v.detail);
                    }
                }
                for f in &report.failures {
                    eprintln!("error: {}: {}", f.experiment, f.message);
                }
                println!("report written to {}", out.join("report.json").display());
                report.exit_status()
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_status()
            }
        },
    };
    ExitCode::from(status.code())
}
