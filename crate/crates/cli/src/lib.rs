//! Command-line front end. [`run`] parses arguments and returns the exit code
//! with the rendered output, so tests can drive it without a subprocess.

pub mod anchors;
pub mod commands;
pub mod input;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::Domain;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    /// A certificate, a root, a definite "no root", or a finished construction.
    Definitive = 0,
    /// `verify-paper` found a failing anchor.
    Failed = 1,
    /// The certifier abstained, or the constructor could not finish.
    Abstain = 2,
    /// The root search ran out of budget.
    Budget = 3,
    /// Unreadable or invalid input.
    Input = 4,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit: Exit,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    pub fn error(exit: Exit, message: String) -> Outcome {
        Outcome { exit, json: json!({ "error": message }), text: format!("error: {message}") }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "noniterate", version, about = "Certify that maps have no iterative roots")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for the randomized parts of `verify-paper`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the finite certifier on a table or rule file.
    Certify {
        #[arg(long)]
        input: PathBuf,
        /// Largest ray index kept when a rule file is infinite.
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        top: i64,
    },
    /// Certify a piecewise-linear interval or circle map.
    CertifyPl {
        #[arg(long)]
        input: PathBuf,
    },
    /// Search exhaustively for g with g^n = f.
    FindRoot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = noniterate::root_solver::DEFAULT_BUDGET)]
        budget: u64,
        /// Count every root instead of stopping at the first.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        top: i64,
    },
    /// Build a certified map within epsilon of the input.
    Construct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long, value_enum)]
        domain: Option<Domain>,
        /// Write the construction trace as JSON here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Replay every published instance from a corpus directory.
    VerifyPaper {
        #[arg(long, default_value = "corpus")]
        input: PathBuf,
    },
    /// Draw a piecewise-linear map as SVG.
    ExportPlot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn verify_paper(dir: &std::path::Path, seed: u64) -> Outcome {
    let results = match anchors::run(dir, seed) {
        Ok(r) => r,
        Err(e) => return Outcome::error(Exit::Input, e.to_string()),
    };
    let pass = results.iter().all(|r| r.pass);
    let lines: Vec<String> =
        results.iter().map(|r| format!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail)).collect();
    let failed = results.iter().filter(|r| !r.pass).count();
    let summary = format!("{} of {} anchors pass", results.len() - failed, results.len());
    Outcome {
        exit: if pass { Exit::Definitive } else { Exit::Failed },
        json: json!({ "pass": pass, "anchors": results, "summary": summary }),
        text: format!("{}\n{summary}", lines.join("\n")),
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Certify { input, top } => commands::certify(input, *top),
        Command::CertifyPl { input } => commands::certify_pl(input),
        Command::FindRoot { input, order, budget, all, top } => commands::find(input, *order, *budget, *all, *top),
        Command::Construct { input, epsilon, domain, trace } => {
            commands::construct(input, epsilon, *domain, trace.as_deref())
        }
        Command::VerifyPaper { input } => verify_paper(input, cli.seed),
        Command::ExportPlot { input, output } => commands::export_plot(input, output.as_deref()),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Input as i32 } else { Exit::Definitive as i32 };
            return (code, e.render().to_string());
        }
    };
    let out = execute(&cli);
    let rendered = match cli.format {
        Format::Text => out.text,
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json values serialize"),
    };
    (out.exit as i32, rendered)
}
