//! `atelier` command line. Exit codes: 0 success, 1 verification or
//! evaluation failure, 2 usage or input error.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, Outcome};

#[derive(Debug, Parser)]
#[command(name = "atelier", version, about = "Retrieval-based avatar generation and editing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or verify a corpus directory.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Print matcher scores between corpus entries.
    #[command(subcommand)]
    Match(MatchCommand),
    /// Conditional generation to a PNG.
    Gen(GenArgs),
    /// Replay a scripted edit sequence, writing one render per step.
    Edit(EditArgs),
    /// Run the acceptance suites and print a pass/fail table.
    Eval(EvalArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Strict reload: rebuild derived rasters and compare with the stored ones.
    Verify { dir: PathBuf },
}

#[derive(Debug, Args)]
pub struct CorpusArg {
    /// Corpus directory.
    #[arg(long, env = "ATELIER_CORPUS")]
    pub corpus: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum MatchCommand {
    /// Semantic score of an entry's annotation against a text query, per part.
    Sem {
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        entry: u32,
        #[arg(long)]
        text: String,
    },
    /// SSIM between two entries' canonical appearance over a part (or the body).
    App {
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        part: Option<String>,
    },
    /// Hu-moment distance between two entries' garment masks on a part.
    Shape {
        #[command(flatten)]
        corpus: CorpusArg,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        part: String,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    #[arg(long, conflicts_with = "sketch", required_unless_present = "sketch")]
    pub text: Option<String>,
    /// JSON file with a sketch request body (`{"strokes": [...]}`).
    #[arg(long)]
    pub sketch: Option<PathBuf>,
    /// Seed of the starting session.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EditArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    /// JSON script: `{"session": {...}, "steps": [{"op": "edit/text", "body": {...}}]}`.
    #[arg(long)]
    pub session_script: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Corpus directory; the seed-1 synthetic corpus when absent.
    #[arg(long, env = "ATELIER_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Run only these criteria.
    #[arg(long)]
    pub only: Vec<String>,
    /// Print results as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub corpus: CorpusArg,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Idle session timeout in seconds.
    #[arg(long, env = "ATELIER_SESSION_TIMEOUT", default_value_t = 1800)]
    pub session_timeout: u64,
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
