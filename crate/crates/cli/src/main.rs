use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bitprobe::report::{render_csv, ExperimentReport};
use clap::{Parser, Subcommand, ValueEnum};

mod report_cmd;
mod scheme_cmd;
mod verify_cmd;

/// Exit statuses: 0 pass, 1 verification failure, 2 usage error, 3 resource cap.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn cap(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<bitprobe::verifier::VerifierError> for CliError {
    fn from(e: bitprobe::verifier::VerifierError) -> Self {
        use bitprobe::verifier::VerifierError;
        match e {
            VerifierError::ResourceCap(_) => Self::cap(e.to_string()),
            VerifierError::Scheme(inner) => inner.into(),
            VerifierError::Model(inner) => inner.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<bitprobe::quantum::QuantumError> for CliError {
    fn from(e: bitprobe::quantum::QuantumError) -> Self {
        match e {
            bitprobe::quantum::QuantumError::ResourceCap(_) => Self::cap(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<bitprobe::classical::SchemeError> for CliError {
    fn from(e: bitprobe::classical::SchemeError) -> Self {
        use bitprobe::classical::SchemeError;
        match e {
            SchemeError::RetryBudgetExhausted { .. } | SchemeError::Inexact { .. } => {
                Self::failed(e.to_string())
            }
            SchemeError::Model(inner) => inner.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<bitprobe::model::ModelError> for CliError {
    fn from(e: bitprobe::model::ModelError) -> Self {
        match e {
            bitprobe::model::ModelError::OutOfRange(_) => Self::cap(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<bitprobe::report::ReportError> for CliError {
    fn from(e: bitprobe::report::ReportError) -> Self {
        Self::usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "bitprobe", version, about = "Static membership in the bit-probe model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, query and benchmark classical schemes.
    #[command(subcommand)]
    Scheme(scheme_cmd::SchemeCommand),
    /// Run verification suites and emit reports.
    #[command(subcommand)]
    Verify(verify_cmd::VerifyCommand),
    /// Merge and render report files.
    #[command(subcommand)]
    Report(report_cmd::ReportCommand),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Where a report goes and in which encoding.
#[derive(clap::Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn command_echo() -> Vec<String> {
    std::env::args().skip(1).collect()
}

pub fn write_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes the report and maps its verdict to an exit status.
pub fn emit(report: &ExperimentReport, output: &OutputArgs) -> Result<(), CliError> {
    let text = match output.format {
        Format::Json => report.to_json(),
        Format::Csv => render_csv(report),
    };
    write_text(&text, output.out.as_deref())?;
    let failing: Vec<&str> =
        report.outcomes.iter().filter(|o| !o.passed).map(|o| o.key.as_str()).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::failed(format!("verification failed: {}", failing.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scheme(c) => scheme_cmd::run(c),
        Command::Verify(c) => verify_cmd::run(c),
        Command::Report(c) => report_cmd::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bitprobe: {}", e.message.lines().next().unwrap_or(""));
            ExitCode::from(e.code)
        }
    }
}
