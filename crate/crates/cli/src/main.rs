mod batch;
mod config;
mod eval;
mod gen;
mod render;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fragsolve::dataset_io::{LoadOptions, Pivot};

use crate::batch::{Outcome, UsageError};

#[derive(Parser)]
#[command(name = "fragsolve", version, about = "Generate, solve, score and render fragment puzzles")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut source images into synthetic puzzle groups.
    Gen(gen::GenArgs),
    /// Run a solver over every group of a dataset.
    Solve(solve::SolveArgs),
    /// Score solutions against ground truth.
    Eval(eval::EvalArgs),
    /// Composite a group at solution (or ground-truth) poses.
    Render(render::RenderArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PivotArg {
    Center,
    TopLeft,
}

/// How dataset groups are read.
#[derive(Args, Clone, Debug)]
pub struct LoadArgs {
    /// Skip malformed files and fragments without a pose instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Ground-truth positions use image (y-down) axes.
    #[arg(long)]
    y_down: bool,
    /// Which raster point ground-truth positions refer to.
    #[arg(long, value_enum, default_value = "center")]
    pivot: PivotArg,
}

impl LoadArgs {
    pub fn options(&self) -> LoadOptions {
        let mut opts = if self.lenient {
            LoadOptions::lenient()
        } else {
            LoadOptions::default()
        };
        opts.y_down = self.y_down;
        opts.pivot = match self.pivot {
            PivotArg::Center => Pivot::Center,
            PivotArg::TopLeft => Pivot::TopLeft,
        };
        opts
    }
}

/// Restrict a run to one side of a split manifest.
#[derive(Args, Clone, Debug)]
pub struct SplitArgs {
    /// Split manifest: one group per line, optionally followed by its set name.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Which set of the split manifest to use.
    #[arg(long, default_value = "test", requires = "split")]
    split_set: String,
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("FRAGSOLVE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("FRAGSOLVE_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(UsageError("FRAGSOLVE_THREADS must be at least 1".into()).into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    init_threads()?;
    match cli.command {
        Command::Gen(args) => gen::run(args),
        Command::Solve(args) => solve::run(args),
        Command::Eval(args) => eval::run(args),
        Command::Render(args) => render::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Partial(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
