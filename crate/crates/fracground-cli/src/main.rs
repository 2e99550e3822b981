use clap::{Parser, Subcommand};
use fracground::report::{self, EXIT_ERROR, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracground", version, about = "Ground states of (-Delta)^s u + lambda u = f(u)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides `output.directory` of the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    Solve { config: PathBuf },
    Spectrum {
        config: PathBuf,
        /// Ground-state record written by `solve`; defaults to `<output>/record.json`.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    Branch { config: PathBuf },
    Verify { config: PathBuf },
    ValidateF { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let path = match &cli.command {
        Command::Solve { config }
        | Command::Spectrum { config, .. }
        | Command::Branch { config }
        | Command::Verify { config }
        | Command::ValidateF { config } => config,
    };
    let mut cfg = match RunConfig::from_path(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    if let Some(d) = cli.output_dir {
        cfg.output.directory = d;
    }
    let code = match &cli.command {
        Command::Solve { .. } => report::cmd_solve(&cfg),
        Command::Spectrum { record, .. } => {
            let rp = record.clone().unwrap_or_else(|| cfg.output.directory.join("record.json"));
            report::cmd_spectrum(&cfg, &rp)
        }
        Command::Branch { .. } => report::cmd_branch(&cfg),
        Command::Verify { .. } => report::cmd_verify(&cfg),
        Command::ValidateF { .. } => report::cmd_validate_f(&cfg),
    };
    ExitCode::from(code as u8)
}
