//! `tocseg` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
//! Diagnostics go to standard error.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tocseg::corpus::{CorpusError, CorpusFormat};
use tocseg::evalmetrics::{Aggregation, EvalError, Mode};
use tocseg::labeling::{LabelError, DEFAULT_WINDOW_SIZE};
use tocseg::tocbuild::TocError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

macro_rules! data_error {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}
data_error!(CorpusError, LabelError, TocError, EvalError);

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Textdir,
    Jsonl,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Textdir => CorpusFormat::TextDir,
            FormatArg::Jsonl => CorpusFormat::JsonLines,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Linear,
    Hierarchical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Linear => Mode::Linear,
            ModeArg::Hierarchical => Mode::Hierarchical,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggArg {
    Micro,
    Macro,
}

impl From<AggArg> for Aggregation {
    fn from(a: AggArg) -> Self {
        match a {
            AggArg::Micro => Aggregation::Micro,
            AggArg::Macro => Aggregation::Macro,
        }
    }
}

#[derive(Parser)]
#[command(name = "tocseg", version, about = "Title/subtitle segmentation of plain-text documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Corpus: a directory of .txt files or a JSON-lines file.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// TOML pattern config (built-in patterns when omitted).
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Denylist file, one normalized title per line.
    #[arg(long)]
    denylist: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Detect headings and write an annotation file.
    Detect {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn gold annotations into token/label training windows.
    Label {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WINDOW_SIZE)]
        window_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a token/label window file (e.g. model predictions) into an
    /// annotation file.
    Decode {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        windows: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions against gold annotations.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value = "hierarchical")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "micro")]
        agg: AggArg,
        /// Boundary tolerance in bytes.
        #[arg(long, default_value_t = 0)]
        slack: usize,
        /// Machine-readable JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and export table-of-contents trees.
    Toc {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        annotations: PathBuf,
        /// Emit JSON lines instead of the text layout.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove sections by heading and write the cleaned corpus.
    Clean {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        annotations: PathBuf,
        /// File of headings to remove, one per line.
        #[arg(long)]
        remove: Option<PathBuf>,
        /// Heading to remove; repeatable.
        #[arg(long = "remove-title")]
        remove_title: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Corpus statistics as JSON.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Candidate-title frequencies before denylist filtering.
    Freq {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        patterns: Option<PathBuf>,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with gold annotations.
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        docs: usize,
        #[arg(long, default_value_t = 5)]
        headings: usize,
        /// Noise lines per document (denylist-worthy false positives).
        #[arg(long, default_value_t = 0)]
        noise: usize,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: FormatArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Also write the planted noise titles as a denylist.
        #[arg(long)]
        denylist_out: Option<PathBuf>,
    },
    /// Union two denylist files.
    MergeDenylist {
        existing: PathBuf,
        additions: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show which pattern matched at an offset.
    Explain {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        doc: String,
        #[arg(long)]
        offset: usize,
    },
    /// Print the built-in pattern config.
    Patterns {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    use commands::*;
    match cli.command {
        Command::Detect { input, engine, out } => detect(&input.input, input.format.into(), &engine, out.as_deref()),
        Command::Label {
            input,
            gold,
            window_size,
            out,
        } => label(&input.input, input.format.into(), &gold, window_size, out.as_deref()),
        Command::Decode { input, windows, out } => decode(&input.input, input.format.into(), &windows, out.as_deref()),
        Command::Eval {
            gold,
            pred,
            mode,
            agg,
            slack,
            out,
        } => eval(&gold, &pred, mode.into(), agg.into(), slack, out.as_deref()),
        Command::Toc {
            input,
            annotations,
            json,
            out,
        } => toc(&input.input, input.format.into(), &annotations, json, out.as_deref()),
        Command::Clean {
            input,
            annotations,
            remove,
            remove_title,
            out,
        } => clean(&input.input, input.format.into(), &annotations, remove.as_deref(), &remove_title, &out),
        Command::Stats { input, engine, out } => stats(&input.input, input.format.into(), &engine, out.as_deref()),
        Command::Freq {
            input,
            patterns,
            top,
            out,
        } => freq(&input.input, input.format.into(), patterns.as_deref(), top, out.as_deref()),
        Command::Generate {
            seed,
            docs,
            headings,
            noise,
            format,
            out,
            gold,
            denylist_out,
        } => generate(
            seed,
            docs,
            headings,
            noise,
            format.into(),
            &out,
            &gold,
            denylist_out.as_deref(),
        ),
        Command::MergeDenylist { existing, additions, out } => merge(&existing, &additions, out.as_deref()),
        Command::Explain {
            input,
            engine,
            doc,
            offset,
        } => explain(&input.input, input.format.into(), &engine, &doc, offset),
        Command::Patterns { out } => patterns(out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tocseg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
