mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser};
use serde::{Deserialize, Serialize};

use config::ConfigFile;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_DATA: u8 = 4;
pub const EXIT_OPERATION: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Operation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Operation(_) => EXIT_OPERATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Operation(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<fsgauge::Error> for CliError {
    fn from(e: fsgauge::Error) -> Self {
        use fsgauge::Error::*;
        match e {
            Io { .. } | Format { .. } | InvalidFeatures(_) | ZeroNorm { .. } => CliError::Data(e.to_string()),
            _ => CliError::Operation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "fsgauge", version, about = "Validation-free generalization gauges for few-shot classifiers")]
struct Cli {
    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    globals: Globals,

    #[command(flatten)]
    task: commands::TaskFlags,

    #[command(subcommand)]
    command: commands::Command,
}

#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Globals {
    /// Global seed; every random draw derives from it
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory
    #[arg(short = 'o', long, global = true)]
    pub out: Option<PathBuf>,
}

fn help_json() -> serde_json::Value {
    fn args_of(cmd: &clap::Command) -> Vec<serde_json::Value> {
        cmd.get_arguments()
            .filter(|a| a.get_long().is_some())
            .map(|a| {
                serde_json::json!({
                    "long": a.get_long(),
                    "short": a.get_short().map(|c| c.to_string()),
                    "help": a.get_help().map(|h| h.to_string()),
                    "takes_value": a.get_action().takes_values(),
                    "global": a.is_global_set(),
                })
            })
            .collect()
    }
    let cmd = Cli::command();
    serde_json::json!({
        "name": cmd.get_name(),
        "version": cmd.get_version(),
        "about": cmd.get_about().map(|s| s.to_string()),
        "exit_codes": {
            "ok": 0, "parse": EXIT_PARSE, "config": EXIT_CONFIG, "data": EXIT_DATA, "operation": EXIT_OPERATION
        },
        "global_args": args_of(&cmd),
        "subcommands": cmd.get_subcommands().map(|s| serde_json::json!({
            "name": s.get_name(),
            "about": s.get_about().map(|a| a.to_string()),
            "args": args_of(s).into_iter().filter(|a| a["global"] == false).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::empty(),
    };
    file.check_sections(commands::NAMES)?;
    let globals = file.resolve_globals(&cli.globals)?;
    let task = file.resolve_section("task", &cli.task)?;
    let seed = globals
        .seed
        .ok_or_else(|| CliError::Config("a seed is required (--seed or `seed` in the config)".into()))?;
    let out = globals.out.clone().unwrap_or_else(|| PathBuf::from("fsgauge-out"));
    let ctx = commands::Context { seed, out, task: task.options()? };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = globals.jobs {
        if j == 0 {
            return Err(CliError::Config("jobs must be >= 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Operation(e.to_string()))?;
    pool.install(|| commands::dispatch(&cli.command, &file, &ctx))
}

fn main() -> ExitCode {
    if std::env::args().skip(1).any(|a| a == "--help-json") {
        println!("{}", serde_json::to_string_pretty(&help_json()).expect("json"));
        return ExitCode::SUCCESS;
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_PARSE),
            };
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fsgauge: {e}");
            ExitCode::from(e.code())
        }
    }
}
