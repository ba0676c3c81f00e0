use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use fragsolve::dataset_io::save_group_2d;
use fragsolve::puzzle_gen::{generate, GenConfig};
use serde::Serialize;

use crate::batch::{display, write_json, Outcome};
use crate::config::{check, set, FileConfig};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Source images (any format the image crate reads as PNG).
    #[arg(required = true)]
    images: Vec<PathBuf>,
    /// Output dataset directory.
    #[arg(short, long)]
    out: PathBuf,
    /// Groups to cut from each image; group k uses seed + k.
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of straight cuts.
    #[arg(long)]
    cuts: Option<usize>,
    /// Maximum erosion depth in pixels.
    #[arg(long)]
    erosion: Option<u32>,
    /// Fraction of the erosion depth that varies along the border.
    #[arg(long)]
    jitter: Option<f64>,
    /// Fraction of fragments to remove.
    #[arg(long)]
    drop: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Store fragments at random orientations.
    #[arg(long)]
    rotate: bool,
}

#[derive(Serialize)]
struct GenRecord {
    group: String,
    source: String,
    seed: u64,
    effective_seed: u64,
    fragments: usize,
    vanished: Vec<String>,
    dropped: Vec<String>,
    cuts: Vec<[[f64; 2]; 2]>,
}

#[derive(Serialize)]
struct GenManifest {
    command: &'static str,
    config: GenConfig,
    groups: Vec<GenRecord>,
}

pub const MANIFEST: &str = "gen_manifest.json";

fn effective_config(args: &GenArgs) -> Result<GenConfig> {
    let mut cfg = FileConfig::load(args.config.as_deref())?.gen;
    set(&mut cfg.n_cuts, args.cuts);
    set(&mut cfg.erosion_px, args.erosion);
    set(&mut cfg.erosion_jitter, args.jitter);
    set(&mut cfg.drop_fraction, args.drop);
    set(&mut cfg.seed, args.seed);
    cfg.rotate |= args.rotate;
    check(cfg.validate())?;
    Ok(cfg)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

pub fn run(args: GenArgs) -> Result<Outcome> {
    let cfg = effective_config(&args)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut records = Vec::new();
    for path in &args.images {
        let image = image::open(path)
            .with_context(|| format!("reading {}", path.display()))?
            .to_rgba8();
        for k in 0..args.count {
            let name = if args.count == 1 {
                stem(path)
            } else {
                format!("{}_{k:03}", stem(path))
            };
            let seed = cfg.seed.wrapping_add(k);
            let g = generate(&image, &GenConfig { seed, ..cfg.clone() }, &name)
                .with_context(|| format!("cutting {}", path.display()))?;
            let dir = args.out.join(&name);
            save_group_2d(&g.puzzle, &dir)?;
            log::info!("{name}: {} fragments", g.puzzle.len());
            records.push(GenRecord {
                group: name,
                source: display(path),
                seed,
                effective_seed: g.effective_seed,
                fragments: g.puzzle.len(),
                vanished: g.vanished,
                dropped: g.dropped,
                cuts: g.cuts.iter().map(|c| [[c.a.x, c.a.y], [c.b.x, c.b.y]]).collect(),
            });
        }
    }
    write_json(
        &args.out.join(MANIFEST),
        &GenManifest {
            command: "gen",
            config: cfg,
            groups: records,
        },
    )?;
    Ok(Outcome::Done)
}
