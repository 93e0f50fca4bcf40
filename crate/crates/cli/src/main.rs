//! Command-line front end for the `lmu` library.

mod commands;
mod style;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    /// A negative answer: check failed, subtype false, join undefined.
    pub const NEGATIVE: u8 = 1;
    /// Malformed input.
    pub const MALFORMED: u8 = 2;
    pub const FUEL_EXHAUSTED: u8 = 3;
    /// Reduction and typing disagree on conclusive evidence.
    pub const DISAGREEMENT: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "lmu", version, about = "Reduction, approximants and intersection types for the lambda-mu calculus")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Reduction steps, graph nodes and typer contractions allowed.
    #[arg(long, global = true, default_value_t = 1000)]
    pub fuel: usize,
    /// Maximum derivation height for type search.
    #[arg(long, global = true, default_value_t = 6)]
    pub depth: usize,
    /// Maximum intersection arity and continuation length for type search.
    #[arg(long, global = true, default_value_t = 3)]
    pub width: usize,
    /// Seed for the random strategy.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// A term given inline or in a file.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// The term, in text syntax.
    #[arg(short = 'e', long = "expr")]
    pub expr: Option<String>,
    /// A file holding the term.
    #[arg(short = 'f', long = "file")]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    Lor,
    RightmostInnermost,
    Random,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemArg {
    S,
    Bot,
    Sn,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a term and print it back.
    Parse(Input),
    /// Reduce a term, printing every step.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = StrategyArg::Lor)]
        strategy: StrategyArg,
    },
    /// Compare reduction behaviour with typeability.
    Classify(Input),
    /// List the maximal approximants of a term.
    Approx(Input),
    /// Join two or more terms.
    Join {
        #[arg(short = 'e', long = "expr", required = true, num_args = 1)]
        exprs: Vec<String>,
    },
    /// Decide the inclusion between two types.
    Subtype {
        #[arg(short = 't', long = "type", required = true, num_args = 1)]
        types: Vec<String>,
        /// Read the types as continuation types.
        #[arg(long)]
        cont: bool,
    },
    /// Check a derivation given as JSON (`-` reads standard input).
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SystemArg::S)]
        system: SystemArg,
    },
    /// Search for typings of a term.
    Infer {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = SystemArg::S)]
        system: SystemArg,
        /// Print the derivations as well as their conclusions.
        #[arg(long)]
        tree: bool,
    },
    /// Work with a corpus of annotated terms.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Subcommand, Debug)]
pub enum CorpusCommand {
    /// Classify every term and compare with its annotations.
    Run {
        /// Corpus file; the bundled corpus when absent.
        file: Option<PathBuf>,
    },
    /// Print the corpus entries.
    List { file: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(commands::run(&cli))
}
