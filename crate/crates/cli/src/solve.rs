use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use fragsolve::dataset_io::{load_group, save_solution_2d};
use fragsolve::fragments::Puzzle;
use fragsolve::solver_genetic::{solve_genetic, write_trace_csv, GeneticConfig};
use fragsolve::solver_greedy::{solve_greedy, write_decision_log, GreedyConfig};

use crate::batch::{display, group_name, run_groups, select_groups, write_json, Outcome, RunManifest, Split};
use crate::config::{check, set, FileConfig};
use crate::{LoadArgs, SplitArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Genetic,
    Greedy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Genetic => "genetic",
            Method::Greedy => "greedy",
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Dataset root (or a single group directory).
    dataset: PathBuf,
    #[arg(short, long, value_enum)]
    method: Method,
    /// Output directory for solutions, logs and the run manifest.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Genetic: population size.
    #[arg(long)]
    population: Option<usize>,
    /// Genetic: number of generations.
    #[arg(long)]
    generations: Option<usize>,
    /// Greedy: candidates scored per step (0 = all).
    #[arg(long)]
    top_k: Option<usize>,
    #[command(flatten)]
    load: LoadArgs,
    #[command(flatten)]
    split: SplitArgs,
}

pub const MANIFEST: &str = "manifest.json";

enum SolverConfig {
    Genetic(GeneticConfig),
    Greedy(GreedyConfig),
}

impl SolverConfig {
    fn from_args(args: &SolveArgs) -> Result<SolverConfig> {
        let file = FileConfig::load(args.config.as_deref())?;
        Ok(match args.method {
            Method::Genetic => {
                let mut cfg = file.genetic;
                set(&mut cfg.seed, args.seed);
                set(&mut cfg.population, args.population);
                set(&mut cfg.generations, args.generations);
                check(cfg.validate())?;
                SolverConfig::Genetic(cfg)
            }
            Method::Greedy => {
                let mut cfg = file.greedy;
                set(&mut cfg.seed, args.seed);
                set(&mut cfg.top_k, args.top_k);
                check(cfg.validate())?;
                SolverConfig::Greedy(cfg)
            }
        })
    }

    fn seed(&self) -> u64 {
        match self {
            SolverConfig::Genetic(c) => c.seed,
            SolverConfig::Greedy(c) => c.seed,
        }
    }

    fn snapshot(&self) -> Result<serde_json::Value> {
        Ok(match self {
            SolverConfig::Genetic(c) => serde_json::to_value(c)?,
            SolverConfig::Greedy(c) => serde_json::to_value(c)?,
        })
    }
}

fn solve_group(dir: &Path, cfg: &SolverConfig, args: &SolveArgs) -> Result<Vec<String>> {
    let name = group_name(dir);
    let puzzle = match load_group(dir, &args.load.options())? {
        Puzzle::Flat(p) => p,
        Puzzle::Solid(_) => bail!("3D groups have no solver; evaluate external poses with `eval`"),
    };
    let solution_path = args.out.join(format!("{name}.txt"));
    let (solution, log_path) = match cfg {
        SolverConfig::Genetic(c) => {
            let r = solve_genetic(&puzzle, c)?;
            let path = args.out.join(format!("{name}.trace.csv"));
            write_trace_csv(&r.trace, &path)?;
            (r.solution, path)
        }
        SolverConfig::Greedy(c) => {
            let r = solve_greedy(&puzzle, c)?;
            let path = args.out.join(format!("{name}.decisions.jsonl"));
            write_decision_log(&r.steps, &path)?;
            (r.solution, path)
        }
    };
    save_solution_2d(&solution, &solution_path)?;
    Ok(vec![display(&solution_path), display(&log_path)])
}

pub fn run(args: SolveArgs) -> Result<Outcome> {
    let cfg = SolverConfig::from_args(&args)?;
    let split = Split::load(&args.split)?;
    let groups = select_groups(&args.dataset, split.as_ref())?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let records = run_groups(&groups, |dir| solve_group(dir, &cfg, &args));
    let manifest = RunManifest {
        command: "solve".into(),
        dataset: display(&args.dataset),
        method: args.method.name().into(),
        seed: cfg.seed(),
        threads: rayon::current_num_threads(),
        config: cfg.snapshot()?,
        groups: records,
    };
    write_json(&args.out.join(MANIFEST), &manifest)?;
    let failed = manifest.failures();
    if failed == manifest.groups.len() {
        bail!("every group failed; see {}", args.out.join(MANIFEST).display());
    }
    Ok(if failed > 0 {
        Outcome::Partial(format!("{failed} of {} groups failed", manifest.groups.len()))
    } else {
        Outcome::Done
    })
}
