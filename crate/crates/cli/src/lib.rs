//! The `riparian` command line.
//!
//! [`run`] parses arguments, executes one command and returns the process
//! exit code: 0 on success, 1 on domain errors (invalid or infeasible input,
//! unrationalizable observations), 2 on usage errors.

mod commands;
mod report;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riparian_core::axioms::AxiomId;
use riparian_core::data::TableFormat;
use riparian_core::RuleSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] riparian_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "riparian",
    version,
    about = "Exact river-sharing allocation rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => TableFormat::Text,
            Format::Csv => TableFormat::Csv,
            Format::Json => TableFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Digits after the decimal point in rounded output.
    #[arg(long, default_value_t = 2)]
    decimals: u32,
}

fn parse_rule(text: &str) -> Result<RuleSpec, String> {
    let rule: RuleSpec = text
        .parse()
        .map_err(|e: riparian_core::Error| e.to_string())?;
    rule.validate().map_err(|e| e.to_string())?;
    Ok(rule)
}

fn parse_axiom(text: &str) -> Result<AxiomId, String> {
    text.parse()
        .map_err(|e: riparian_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Allocate the inflows of a problem under one rule.
    Allocate {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleSpec,
        /// `nile` or a CSV/JSON problem file.
        #[arg(long)]
        problem: String,
        #[command(flatten)]
        output: Output,
    },
    /// Allocations of several rules side by side.
    Compare {
        /// Repeatable; defaults to FT, γ=1/4, γ=1/2, γ=3/4, NT and S.
        #[arg(long, value_parser = parse_rule)]
        rule: Vec<RuleSpec>,
        #[arg(long)]
        problem: String,
        /// Add an observed allocation column: `scaled`, `raw` or a file.
        #[arg(long)]
        observed: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Recover retention shares reproducing an observed allocation, and the
    /// best single share.
    Rationalize {
        #[arg(long)]
        problem: String,
        /// `scaled` (withdrawals rescaled to total inflow), `raw`, or a file.
        #[arg(long, default_value = "scaled")]
        observed: String,
        #[command(flatten)]
        output: Output,
    },
    /// Check axioms on perturbations of one problem.
    AxiomsCheck {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleSpec,
        #[arg(long)]
        problem: String,
        /// Check one axiom only; all by default.
        #[arg(long, value_parser = parse_axiom)]
        axiom: Option<AxiomId>,
        /// Exit 1 when a violation is found.
        #[arg(long)]
        fail_on_witness: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Seeded random search for axiom violations.
    AxiomsSearch {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleSpec,
        #[arg(long, value_parser = parse_axiom)]
        axiom: Option<AxiomId>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        /// Fix the number of agents instead of drawing it from 3..=8.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        fail_on_witness: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Test whether a rule is a multi-parameter geometric rule on lines.
    Characterize {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleSpec,
        /// Line length; defaults to the rule's vector length or 5.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Recompute the Nile table and the four-agent example and list every
    /// printed value the engine disagrees with.
    ReproduceNile {
        #[command(flatten)]
        output: Output,
    },
    /// Write a random linear problem file.
    Generate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `text` is treated as CSV.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Runs the command line, writing documents to `stdout` and diagnostics to
/// `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match commands::execute(cli.command) {
        Ok(document) => match stdout.write_all(document.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                1
            }
        },
        Err(commands::Failure::Witness(document)) => {
            let _ = stdout.write_all(document.as_bytes());
            1
        }
        Err(commands::Failure::Error(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
