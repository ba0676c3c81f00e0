use std::io::Cursor;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use fragsolve::dataset_io::{load_group_2d, load_solution_2d, write_atomic};
use fragsolve::fragments::{place, Puzzle2D, Solution2D};
use fragsolve::geometry::CellRect;
use fragsolve::puzzle_gen::composite;
use image::{imageops, ImageFormat, Rgba, RgbaImage};

use crate::LoadArgs;

/// Blank border around the assembly, in pixels.
pub const MARGIN: i64 = 10;

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Group directory.
    group: PathBuf,
    /// Solution file; the ground truth is rendered when omitted.
    #[arg(short, long)]
    solution: Option<PathBuf>,
    /// Output PNG.
    #[arg(short, long)]
    out: PathBuf,
    /// Put the ground truth to the left of the solution.
    #[arg(long)]
    compare: bool,
    #[command(flatten)]
    load: LoadArgs,
}

/// Composite every posed fragment on a canvas fitted to their extent.
pub fn render(puzzle: &Puzzle2D, solution: &Solution2D) -> RgbaImage {
    let rect = puzzle
        .fragments
        .iter()
        .filter_map(|f| solution.get(f.id()).map(|p| place(f, p)))
        .filter(|m| !m.is_empty())
        .map(|m| m.rect())
        .reduce(|a, b| a.union(&b))
        .unwrap_or(CellRect {
            x0: 0,
            y0: 0,
            x1: 1,
            y1: 1,
        });
    let width = (rect.x1 - rect.x0 + 2 * MARGIN) as u32;
    let height = (rect.y1 - rect.y0 + 2 * MARGIN) as u32;
    composite(
        &puzzle.fragments,
        solution,
        (rect.x0 - MARGIN, rect.y0 - MARGIN),
        width,
        height,
    )
}

fn side_by_side(left: &RgbaImage, right: &RgbaImage) -> RgbaImage {
    let gap = MARGIN as u32;
    let mut out = RgbaImage::from_pixel(
        left.width() + gap + right.width(),
        left.height().max(right.height()),
        Rgba([0, 0, 0, 0]),
    );
    imageops::replace(&mut out, left, 0, 0);
    imageops::replace(&mut out, right, (left.width() + gap) as i64, 0);
    out
}

pub fn run(args: RenderArgs) -> Result<crate::batch::Outcome> {
    let puzzle = load_group_2d(&args.group, &args.load.options())?;
    let gt = puzzle.ground_truth.as_ref();
    let solution = match &args.solution {
        Some(path) => load_solution_2d(path)?,
        None => match gt {
            Some(gt) => gt.clone(),
            None => bail!("{} has no ground truth; pass --solution", args.group.display()),
        },
    };
    let mut img = render(&puzzle, &solution);
    if args.compare {
        let Some(gt) = gt else {
            bail!("--compare needs ground truth in {}", args.group.display());
        };
        img = side_by_side(&render(&puzzle, gt), &img);
    }
    let mut bytes = Vec::new();
    img.write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png)?;
    write_atomic(&args.out, &bytes).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(crate::batch::Outcome::Done)
}
