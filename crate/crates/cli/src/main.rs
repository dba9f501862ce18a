use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hodgefrob_cli::commands::{EXIT_CONFIG, EXIT_FAILURE};
use hodgefrob_cli::{execute, Command, Context, RunConfig};

#[derive(Parser)]
#[command(name = "hodgefrob", version, about = "Hodge-Frobenius solvers, transforms and checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (`[section]` headers with `key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "./out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Family parameters, sonic speed and hypothesis constants of the density.
    DensityReport,
    /// Solve the boundary-value problem; writes u.csv, Q.csv, residual.csv.
    Solve,
    /// Hodge duality of a solution.
    Backlund,
    /// Eikonal transform of a potential.
    Eikonal,
    /// Mean-value ratios on discs of a solution.
    MeanValue,
    /// Ring maxima of Qρ(Q) near an excised set across refinements.
    SingularityProbe,
    /// Run the full check suite.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(EXIT_CONFIG as u8);
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(EXIT_FAILURE as u8);
    }
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let command = match cli.command {
        Cmd::DensityReport => Command::DensityReport,
        Cmd::Solve => Command::Solve,
        Cmd::Backlund => Command::Backlund,
        Cmd::Eikonal => Command::Eikonal,
        Cmd::MeanValue => Command::MeanValue,
        Cmd::SingularityProbe => Command::SingularityProbe,
        Cmd::Verify => Command::Verify,
    };
    let ctx = Context {
        out_dir: cli.out,
        config_dir: path
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let outcome = execute(command, &cfg, &ctx);
    print!("{}", outcome.report.render());
    if let Some(m) = &outcome.message {
        eprintln!("error: {m}");
    }
    ExitCode::from(outcome.code as u8)
}
