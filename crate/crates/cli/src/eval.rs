use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use fragsolve::dataset_io::{load_group, load_solution, write_atomic};
use fragsolve::metrics::{csv_row, evaluate, mean_report, MetricsConfig, MetricsReport, CSV_HEADER};
use rayon::prelude::*;
use serde::Serialize;

use crate::batch::{group_name, select_groups, write_json, Outcome, Split};
use crate::config::{check, set, FileConfig};
use crate::{LoadArgs, SplitArgs};

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Dataset root (or a single group directory) with ground truth.
    dataset: PathBuf,
    /// Directory of `<group>.txt` solution files.
    solutions: PathBuf,
    /// CSV report path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write a JSON report with per-group status.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Method label for the report rows. Defaults to the solve manifest's
    /// method, then the solutions directory name.
    #[arg(long)]
    method: Option<String>,
    /// Exit with status 3 when any group has no usable solution.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Neighbour distance threshold (px in 2D, mm in 3D).
    #[arg(long)]
    tau: Option<f64>,
    /// Canvas cell size in fragment pixels.
    #[arg(long)]
    cell: Option<f64>,
    /// Report sqrt(mean(d^2)) instead of sum(d)/sqrt(n).
    #[arg(long)]
    classic_rmse: bool,
    /// Compute RMSE on raw poses rather than after anchor alignment.
    #[arg(long)]
    raw_rmse: bool,
    #[command(flatten)]
    load: LoadArgs,
    #[command(flatten)]
    split: SplitArgs,
}

#[derive(Serialize)]
struct Row {
    group: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<MetricsReport>,
}

#[derive(Serialize)]
struct Report<'a> {
    method: &'a str,
    config: &'a MetricsConfig,
    rows: &'a [Row],
    mean: Option<MetricsReport>,
}

fn effective_config(args: &EvalArgs) -> Result<MetricsConfig> {
    let mut cfg = FileConfig::load(args.config.as_deref())?.metrics;
    if args.tau.is_some() {
        cfg.neighbor_tau = args.tau;
    }
    set(&mut cfg.raster_cell, args.cell);
    cfg.classic_rmse |= args.classic_rmse;
    if args.raw_rmse {
        cfg.rmse_after_anchor = false;
    }
    check(cfg.validate())?;
    Ok(cfg)
}

fn method_label(args: &EvalArgs) -> String {
    if let Some(m) = &args.method {
        return m.clone();
    }
    let manifest = args.solutions.join(crate::solve::MANIFEST);
    if let Ok(text) = std::fs::read_to_string(&manifest) {
        if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
            if let Some(m) = v.get("method").and_then(|m| m.as_str()) {
                return m.to_owned();
            }
        }
    }
    group_name(&args.solutions)
}

fn eval_group(dir: &Path, args: &EvalArgs, cfg: &MetricsConfig) -> Row {
    let group = group_name(dir);
    let path = args.solutions.join(format!("{group}.txt"));
    if !path.exists() {
        return Row {
            group,
            status: "missing",
            error: None,
            report: None,
        };
    }
    let result = (|| -> Result<MetricsReport> {
        let puzzle = load_group(dir, &args.load.options())?;
        let solution = load_solution(&path)?;
        Ok(evaluate(&solution, &puzzle, cfg)?)
    })();
    match result {
        Ok(report) => Row {
            group,
            status: "ok",
            error: None,
            report: Some(report),
        },
        Err(e) => {
            log::error!("{group}: {e:#}");
            Row {
                group,
                status: "error",
                error: Some(format!("{e:#}")),
                report: None,
            }
        }
    }
}

pub fn run(args: EvalArgs) -> Result<Outcome> {
    let cfg = effective_config(&args)?;
    let method = method_label(&args);
    let split = Split::load(&args.split)?;
    let groups = select_groups(&args.dataset, split.as_ref())?;
    if !args.solutions.is_dir() {
        anyhow::bail!("solutions directory {} does not exist", args.solutions.display());
    }

    let rows: Vec<Row> = groups.par_iter().map(|dir| eval_group(dir, &args, &cfg)).collect();
    let reports: Vec<MetricsReport> = rows.iter().filter_map(|r| r.report.clone()).collect();
    let mean = mean_report(&reports, "mean");

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&csv_row(&row.group, &method, row.report.as_ref()));
        csv.push('\n');
    }
    csv.push_str(&csv_row("mean", &method, mean.as_ref()));
    csv.push('\n');
    match &args.out {
        Some(path) => write_atomic(path, csv.as_bytes()).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.json {
        write_json(
            path,
            &Report {
                method: &method,
                config: &cfg,
                rows: &rows,
                mean,
            },
        )?;
    }

    let missing = rows.iter().filter(|r| r.status == "missing").count();
    let errors = rows.iter().filter(|r| r.status == "error").count();
    if errors == rows.len() {
        anyhow::bail!("no group could be evaluated");
    }
    if errors > 0 {
        return Ok(Outcome::Partial(format!("{errors} group(s) failed to evaluate")));
    }
    if missing > 0 {
        log::warn!("{missing} group(s) have no solution");
        if args.strict {
            return Ok(Outcome::Partial(format!("{missing} group(s) have no solution")));
        }
    }
    Ok(Outcome::Done)
}
