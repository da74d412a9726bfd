//! `jetgeo` — numerical verification of contact-metric and Ricci-soliton
//! identities on closed-form models.
//!
//! Exit codes: 0 all checks pass, 1 verification failure, 2 usage error,
//! 3 numeric capability error.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jetgeo::runner::{
    report_matrix, run_suite, MatrixConfig, ModelSelector, RunConfig, SuiteKind,
};
use jetgeo::Error;

#[derive(Parser)]
#[command(
    name = "jetgeo",
    version,
    about = "Verify contact-geometry and Ricci-soliton tensor identities at machine precision"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite on one model.
    Verify(VerifyArgs),
    /// Run every applicable suite on the whole model catalog and emit the
    /// equation-coverage matrix.
    ReportMatrix(MatrixArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Axioms,
    Identities,
    Classify,
    Theorem1,
    Lemma1,
    Theorem2,
    Pde,
    Integrability,
    Universal,
}

impl From<SuiteArg> for SuiteKind {
    fn from(s: SuiteArg) -> SuiteKind {
        match s {
            SuiteArg::Axioms => SuiteKind::Axioms,
            SuiteArg::Identities => SuiteKind::Identities,
            SuiteArg::Classify => SuiteKind::Classify,
            SuiteArg::Theorem1 => SuiteKind::Theorem1,
            SuiteArg::Lemma1 => SuiteKind::Lemma1,
            SuiteArg::Theorem2 => SuiteKind::Theorem2,
            SuiteArg::Pde => SuiteKind::Pde,
            SuiteArg::Integrability => SuiteKind::Integrability,
            SuiteArg::Universal => SuiteKind::Universal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Base tolerance; per-check thresholds scale proportionally from their
    /// pinned defaults.
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,

    /// Jet truncation order for the derivative towers (1..=3).
    #[arg(long, default_value_t = 3)]
    jet_order: usize,

    /// Sample points per check.
    #[arg(long)]
    samples: Option<usize>,

    /// Seed for the point sampler.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run.
    #[arg(value_enum)]
    suite: SuiteArg,

    /// Model selector, e.g. heisenberg:n=2, heisenberg-deformed:n=1,a=2,
    /// random:dim=3,seed=7.
    #[arg(long)]
    model: String,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 2,
        Error::Capability(_)
        | Error::Singular(_)
        | Error::Numeric(_)
        | Error::Domain(_)
        | Error::Generation(_) => 3,
        Error::Precondition(_) | Error::TheoremViolation(_) | Error::ModelRejected(_) => 1,
    }
}

fn emit(text: String, output: &Option<String>) -> std::io::Result<()> {
    match output {
        Some(path) => fs::write(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => {
            let model: ModelSelector = match args.model.parse() {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let cfg = RunConfig {
                suite: args.suite.into(),
                model,
                tolerance: args.common.tolerance,
                jet_order: args.common.jet_order,
                samples: args.common.samples.unwrap_or(64),
                seed: args.common.seed,
            };
            let start = Instant::now();
            match run_suite(&cfg) {
                Ok(report) => {
                    let text = match args.common.format {
                        Format::Json => report.to_json(),
                        Format::Text => format!(
                            "{}runtime: {:.2}s",
                            report.render_text(),
                            start.elapsed().as_secs_f64()
                        ),
                    };
                    if let Err(e) = emit(text, &args.common.output) {
                        eprintln!("error: cannot write report: {e}");
                        return ExitCode::from(3);
                    }
                    if report.overall_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(error_exit_code(&e))
                }
            }
        }
        Command::ReportMatrix(args) => {
            let cfg = MatrixConfig {
                tolerance: args.common.tolerance,
                jet_order: args.common.jet_order,
                samples: args.common.samples.unwrap_or(16),
                seed: args.common.seed,
            };
            let start = Instant::now();
            match report_matrix(&cfg) {
                Ok(matrix) => {
                    let text = match args.common.format {
                        Format::Json => matrix.to_json(),
                        Format::Text => format!(
                            "{}runtime: {:.2}s",
                            matrix.render_text(),
                            start.elapsed().as_secs_f64()
                        ),
                    };
                    if let Err(e) = emit(text, &args.common.output) {
                        eprintln!("error: cannot write report: {e}");
                        return ExitCode::from(3);
                    }
                    if matrix.overall_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(error_exit_code(&e))
                }
            }
        }
    }
}
