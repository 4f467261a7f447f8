use std::path::PathBuf;
use std::process::ExitCode;

use carasel::corr::Mode;
use carasel_cli::{read_certificate, report, run_file, Overrides};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "carasel", version, about = "Certified selections and random equilibria on finite grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a problem file and write `<input>.cert.json`.
    Run {
        input: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        eps_eq: Option<f64>,
        #[arg(long)]
        mesh: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Check witness continuity on the whole grid.
        #[arg(long)]
        strict_cip: bool,
        /// Certificate path (defaults to beside the input).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override any option, e.g. `--set restarts=0`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Summarize a certificate.
    Report { certificate: PathBuf },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: carasel::Error| e.to_string())
}

fn init_threads() {
    if let Some(n) = std::env::var("CARASEL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { input, tol, eps_eq, mesh, seed, mode, strict_cip, out, set } => {
            let overrides = Overrides { tol, eps_eq, mesh, seed, mode, strict_cip, set };
            match run_file(&input, &overrides, out.as_deref()) {
                Ok((cert, path)) => {
                    println!("{:?}: {}", cert.status, path.display());
                    ExitCode::from(cert.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Report { certificate } => match read_certificate(&certificate) {
            Ok(cert) => {
                print!("{}", report(&cert));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
