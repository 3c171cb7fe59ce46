//! `hermlat`: class groups, unimodular lattice enumeration, isometry and
//! field-of-moduli tests over imaginary quadratic orders.

mod tasks;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Classgroup,
    Enumerate,
    Moduli,
    Isometry,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "hermlat", version, about)]
pub struct Cli {
    /// Task to run. Can also be given with `--task`.
    #[arg(value_enum)]
    pub task: Option<Task>,

    /// Lattice JSON files: two for `isometry`, optionally one for `moduli`.
    pub files: Vec<PathBuf>,

    #[arg(long = "task", id = "task_flag", value_enum, env = "HERMLAT_TASK")]
    pub task_flag: Option<Task>,

    /// Fundamental discriminants, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, env = "HERMLAT_DISC")]
    pub disc: Vec<i64>,

    /// Inclusive range `A..B`; non-fundamental values are skipped.
    #[arg(long, allow_hyphen_values = true, env = "HERMLAT_DISC_RANGE")]
    pub disc_range: Option<String>,

    /// Lattice rank.
    #[arg(long, env = "HERMLAT_G")]
    pub g: Option<usize>,

    #[arg(long, env = "HERMLAT_FREE_ONLY")]
    pub free_only: bool,

    #[arg(long, env = "HERMLAT_INDECOMPOSABLE_ONLY")]
    pub indecomposable_only: bool,

    /// Run the Galois test over every ideal class instead of generators.
    #[arg(long, env = "HERMLAT_ALL_CLASSES")]
    pub all_classes: bool,

    #[arg(long, value_enum, default_value = "text", env = "HERMLAT_FORMAT")]
    pub format: Format,

    /// Wall-clock cap per discriminant.
    #[arg(long, default_value_t = 300, env = "HERMLAT_MAX_SECONDS")]
    pub max_seconds: u64,

    /// Cap on complete Gram candidates per discriminant.
    #[arg(long, env = "HERMLAT_MAX_CANDIDATES")]
    pub max_candidates: Option<u64>,

    /// Lift both resource caps.
    #[arg(long, env = "HERMLAT_FORCE")]
    pub force: bool,

    /// Shuffle the enumeration order with this seed.
    #[arg(long, env = "HERMLAT_SEED")]
    pub seed: Option<u64>,

    /// Worker threads for per-discriminant work.
    #[arg(long, env = "HERMLAT_WORKERS")]
    pub workers: Option<usize>,

    /// Write the output here instead of stdout.
    #[arg(long, env = "HERMLAT_OUT")]
    pub out: Option<PathBuf>,
}

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCOMPLETE: u8 = 3;

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let task = match (cli.task, cli.task_flag) {
        (Some(a), Some(b)) if a != b => usage("the positional task and --task disagree"),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => usage("a task is required"),
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            usage(&format!("cannot configure {n} workers: {e}"));
        }
    }
    let outcome = match tasks::run(task, &cli) {
        Ok(o) => o,
        Err(tasks::Failure::Usage(msg)) => usage(&msg),
        Err(tasks::Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &outcome.text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(outcome.code)
}

fn usage(msg: &str) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}
