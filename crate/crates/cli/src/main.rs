use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use openholo_cli::{run_file, Mode, Overrides};

#[derive(Parser)]
#[command(
    name = "openholo",
    version,
    about = "Holonomies of open quantum systems under quantum jumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run configuration.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// nojump, enumerate, montecarlo, master or robustness.
        #[arg(long)]
        mode: Option<Mode>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            mode,
        } => match run_file(&config, &Overrides { out, seed, mode }) {
            Ok((_, written)) => {
                for path in written {
                    println!("{}", path.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
