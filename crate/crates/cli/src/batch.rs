//! Shared plumbing for batch commands: group selection, manifests and
//! atomic output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use fragsolve::dataset_io::{list_groups, write_atomic};
use rayon::prelude::*;
use serde::Serialize;

use crate::SplitArgs;

/// Bad flags or configuration; exits with status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub enum Outcome {
    Done,
    /// Some work items failed; the rest were written.
    Partial(String),
}

pub fn group_name(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

/// Group membership read from a split manifest.
pub struct Split {
    members: BTreeMap<String, Option<String>>,
    set: String,
}

impl Split {
    pub fn load(args: &SplitArgs) -> Result<Option<Split>> {
        let Some(path) = &args.split else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading split {}", path.display()))?;
        let mut members = BTreeMap::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split(|c: char| c.is_whitespace() || c == ',');
            let group = it.next().unwrap_or_default().to_owned();
            let set = it.find(|s| !s.is_empty()).map(str::to_owned);
            members.insert(group, set);
        }
        Ok(Some(Split {
            members,
            set: args.split_set.clone(),
        }))
    }

    pub fn contains(&self, group: &str) -> bool {
        match self.members.get(group) {
            None => false,
            Some(None) => true,
            Some(Some(set)) => *set == self.set,
        }
    }
}

/// Dataset groups, sorted by name and filtered by the split.
pub fn select_groups(root: &Path, split: Option<&Split>) -> Result<Vec<PathBuf>> {
    let groups = list_groups(root).with_context(|| format!("listing groups in {}", root.display()))?;
    let groups: Vec<PathBuf> = groups
        .into_iter()
        .filter(|g| split.is_none_or(|s| s.contains(&group_name(g))))
        .collect();
    if groups.is_empty() {
        anyhow::bail!("no puzzle groups found under {}", root.display());
    }
    Ok(groups)
}

#[derive(Debug, Serialize)]
pub struct GroupRecord {
    pub group: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seconds: f64,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub dataset: String,
    pub method: String,
    pub seed: u64,
    pub threads: usize,
    pub config: serde_json::Value,
    pub groups: Vec<GroupRecord>,
}

impl RunManifest {
    pub fn failures(&self) -> usize {
        self.groups.iter().filter(|g| g.status != "ok").count()
    }
}

/// Runs `job` on every group on the worker pool. Records come back in
/// input order whatever the scheduling.
pub fn run_groups<F>(groups: &[PathBuf], job: F) -> Vec<GroupRecord>
where
    F: Fn(&Path) -> Result<Vec<String>> + Sync,
{
    groups
        .par_iter()
        .map(|dir| {
            let name = group_name(dir);
            let start = Instant::now();
            let result = job(dir);
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok(outputs) => {
                    log::info!("{name}: done in {seconds:.2}s");
                    GroupRecord {
                        group: name,
                        status: "ok",
                        error: None,
                        seconds,
                        outputs,
                    }
                }
                Err(e) => {
                    log::error!("{name}: {e:#}");
                    GroupRecord {
                        group: name,
                        status: "failed",
                        error: Some(format!("{e:#}")),
                        seconds,
                        outputs: Vec::new(),
                    }
                }
            }
        })
        .collect()
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
