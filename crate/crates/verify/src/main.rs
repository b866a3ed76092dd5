use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use g2monge_verify::{explain, list, parse_rational, run, Rat, Settings, VerifyError};

#[derive(Parser)]
#[command(name = "verify", version, about = "Certify the Monge normal form catalogue")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks and print a report.
    Run {
        /// Check id or instance id; repeatable. Runs everything when absent.
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Value of alpha as N or N/D; repeatable.
        #[arg(long = "alpha", value_parser = rational, allow_hyphen_values = true)]
        alphas: Vec<Rat>,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        beta: Option<Rat>,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        gamma: Option<Rat>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Sample points for numeric checks.
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Flatness tolerance on max|C| / max|R|.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include certificates, connection coefficients and sample data.
        #[arg(long)]
        dump: bool,
        /// Record elapsed time per check.
        #[arg(long)]
        timings: bool,
    },
    /// List registered checks.
    List,
    /// Describe a check and dump the objects it uses.
    Explain { id: String },
    /// Inspect the model catalogue.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
    Dump { name: String },
}

fn rational(s: &str) -> Result<Rat, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn threads() -> Option<usize> {
    std::env::var("VERIFY_THREADS").ok()?.parse().ok()
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            checks,
            alphas,
            beta,
            gamma,
            seed,
            points,
            tol,
            format,
            dump,
            timings,
        } => {
            let pair = match (beta, gamma) {
                (Some(b), Some(g)) => Some((b, g)),
                (None, None) => None,
                _ => return usage(VerifyError::IncompletePair),
            };
            let settings = Settings {
                alphas,
                pair,
                seed,
                points,
                tol,
                dump,
                timings,
            };
            match run(&checks, &settings, threads()) {
                Ok(report) => {
                    match format {
                        Format::Json => println!("{}", report.to_json()),
                        Format::Text => print!("{}", report.to_text()),
                    }
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e @ VerifyError::Pool(_)) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
                Err(e) => usage(e),
            }
        }
        Command::List => {
            print!("{}", list());
            ExitCode::SUCCESS
        }
        Command::Explain { id } => match explain(&id) {
            Ok(t) => {
                print!("{t}");
                ExitCode::SUCCESS
            }
            Err(e) => usage(e),
        },
        Command::Models { action } => match action {
            ModelsAction::List => {
                for e in g2monge::models::catalogue() {
                    println!("{:<18} {:<16} {:<18} {}", e.name, e.kind, e.chart, e.summary);
                }
                ExitCode::SUCCESS
            }
            ModelsAction::Dump { name } => match g2monge::models::dump(&name, &Default::default()) {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage(e),
            },
        },
    }
}
