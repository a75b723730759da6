mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Output;

#[derive(Parser, Debug)]
#[command(
    name = "endspace",
    version,
    about = "Ends, quotients and spanning trees of layered infinite graphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Level budget; presets default to their own profile, files to 16.
    #[arg(long, global = true, env = "ENDSPACE_LEVEL")]
    pub level: Option<u32>,
    /// Maximum number of edges in an enumerated cut.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// Teeth or leaves required of a witness.
    #[arg(long, global = true)]
    pub threshold: Option<usize>,
    /// Directory for cached results.
    #[arg(long, global = true, env = "ENDSPACE_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Dot,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Object {
    Quotient,
    Contraction,
    Tower,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check a presentation and optionally print a truncation.
    Parse {
        pres: String,
        #[arg(long)]
        truncate: Option<u32>,
    },
    /// Enumerate certified cuts.
    Cuts { pres: String },
    /// Quotient graph over a set of cuts.
    Quotient {
        pres: String,
        /// Comma-separated cut indices or `&`-joined edge names.
        #[arg(long, default_value = "")]
        cuts: String,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Contraction graph of a finite edge set.
    Contract {
        pres: String,
        /// Comma-separated edge names or cut indices.
        #[arg(long, default_value = "")]
        edges: String,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Detected ends with their side tables.
    Ends { pres: String },
    /// Classes of points no cut separates.
    Classes { pres: String },
    /// Tower of spanning trees over an ordered cut sequence.
    Tree {
        pres: String,
        #[arg(long, default_value = "")]
        cuts: String,
        #[arg(long)]
        depth: Option<usize>,
        /// File pattern; `{j}` is replaced by the level, otherwise `_j` is appended.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run every law check.
    Verify { pres: String },
    /// Write one object in the chosen format.
    Export {
        pres: String,
        #[arg(value_enum)]
        object: Object,
        #[arg(long, default_value = "")]
        cuts: String,
        #[arg(long, default_value = "")]
        edges: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cache::run_cached(&cli.global, &cli.command) {
        Ok(Output { stdout, files, code }) => {
            for (path, body) in &files {
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(2);
                }
            }
            print!("{stdout}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
