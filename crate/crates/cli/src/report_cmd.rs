use std::path::PathBuf;

use bitprobe::report::{merge, ExperimentReport};
use clap::Subcommand;

use crate::{read_text, write_text, CliError, Format, OutputArgs};

#[derive(Subcommand)]
pub enum ReportCommand {
    /// Union of several reports; conflicting outcomes are an error.
    Merge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-encode one report, by default as CSV.
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<ExperimentReport, CliError> {
    ExperimentReport::from_json(&read_text(path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn run(command: ReportCommand) -> Result<(), CliError> {
    match command {
        ReportCommand::Merge { inputs, output } => {
            let reports = inputs.iter().map(load).collect::<Result<Vec<_>, _>>()?;
            let merged = merge(&reports)?;
            let text = match output.format {
                Format::Json => merged.to_json(),
                Format::Csv => bitprobe::report::render_csv(&merged),
            };
            write_text(&text, output.out.as_deref())
        }
        ReportCommand::Render { input, format, out } => {
            let report = load(&input)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => bitprobe::report::render_csv(&report),
            };
            write_text(&text, out.as_deref())
        }
    }
}
