//! The `eac` command line.
//!
//! Exit codes: 0 success, 1 validation errors (or warnings under
//! `--strict`), 2 usage or parse errors, 3 I/O errors.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eac_core::dsl::ParseDiagnostic;
use thiserror::Error;

mod commands;
pub mod config;
pub mod diagnostics;

pub use config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Findings,
    Usage,
    Io,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Findings => 1,
            ExitStatus::Usage => 2,
            ExitStatus::Io => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    /// The input did not parse; the diagnostics are reported in full.
    #[error("{file}: does not parse")]
    Parse { file: String, diagnostics: Vec<ParseDiagnostic> },
    /// A well-formed request the model rejects.
    #[error("{0}")]
    Rejected(String),
}

impl Failure {
    pub fn status(&self) -> ExitStatus {
        match self {
            Failure::Usage(_) => ExitStatus::Usage,
            Failure::Io { .. } => ExitStatus::Io,
            Failure::Rejected(_) => ExitStatus::Findings,
            Failure::Parse { diagnostics, .. } => {
                if diagnostics.iter().filter(|d| d.is_error()).all(ParseDiagnostic::is_structural) {
                    ExitStatus::Findings
                } else {
                    ExitStatus::Usage
                }
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eac", version, about = "Author, check and review ethical assurance cases")]
pub struct Cli {
    /// Emit machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Md,
    Json,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Audience tier of the reader (public, stakeholder, auditor).
    #[arg(long)]
    pub tier: Option<String>,
    /// Only these goals and what supports them (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub goals: Vec<String>,
    /// Only claims tagged with these lifecycle stages (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub stages: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum PatternCommand {
    /// Fill a pattern's slots and emit the resulting case.
    Instantiate {
        pattern: PathBuf,
        /// `slot=value`, once per slot.
        #[arg(long = "bind", value_name = "SLOT=VALUE")]
        bind: Vec<String>,
        #[arg(long, default_value = "")]
        prefix: String,
        /// Merge into this case instead of starting a new one.
        #[arg(long)]
        into: Option<PathBuf>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Generalise two or more cases into a pattern.
    Derive {
        #[arg(required = true, num_args = 2..)]
        cases: Vec<PathBuf>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scaffold a new case file.
    New {
        title: String,
        #[arg(long)]
        id: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Check a case against the rules of its phase.
    Validate {
        file: PathBuf,
        #[arg(long)]
        phase: Option<String>,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Print the status of every element.
    Status {
        file: PathBuf,
        /// Show how one element's status was derived.
        #[arg(long, value_name = "ID")]
        explain: Option<String>,
    },
    /// Render a case as a graph, a report or an interchange document.
    Render {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Record an evidence appraisal in a case file.
    Appraise {
        file: PathBuf,
        #[arg(long)]
        evidence: String,
        #[arg(long)]
        relevance: String,
        #[arg(long)]
        materiality: String,
        #[arg(long)]
        admissibility: String,
        #[arg(long)]
        value: f64,
        #[arg(long, default_value = "unspecified")]
        assessor: String,
        /// Date of the appraisal (YYYY-MM-DD); today when omitted.
        #[arg(long)]
        date: Option<String>,
        /// Write the updated case here instead of in place.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Sufficiency of every claim from appraised evidence.
    Sufficiency {
        file: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Lifecycle stages covered by property claims.
    Coverage { file: PathBuf },
    /// Argument patterns.
    #[command(subcommand)]
    Pattern(PatternCommand),
    /// Freeze a case under a label.
    Snapshot {
        file: PathBuf,
        #[arg(long)]
        label: String,
        /// Timestamp to record (RFC 3339); now when omitted.
        #[arg(long)]
        at: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Changes between two snapshots.
    Diff { from: PathBuf, to: PathBuf },
    /// Run the review service over a directory of cases.
    Serve {
        dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { ExitStatus::Usage } else { ExitStatus::Success };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return status;
        }
    };
    let json = cli.json;
    match commands::dispatch(cli, stdout, stderr) {
        Ok(status) => status,
        Err(failure) => {
            report_failure(&failure, json, stdout, stderr);
            failure.status()
        }
    }
}

fn report_failure(failure: &Failure, json: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) {
    use diagnostics::{json_doc, write_human, Located};
    let _ = match failure {
        Failure::Parse { file, diagnostics } => {
            let found: Vec<Located> = diagnostics.iter().map(Located::from_parse).collect();
            if json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&json_doc(file, &found)).expect("serializes"))
            } else {
                write_human(stderr, file, &found)
            }
        }
        other => {
            if json {
                let doc = serde_json::json!({ "version": "1", "error": other.to_string(), "exit": other.status().code() });
                writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("serializes"))
            } else {
                writeln!(stderr, "error: {other}")
            }
        }
    };
}
