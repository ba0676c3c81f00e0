use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fragments::{
    Canvas, Fragment2D, Fragment3D, Pose2D, Pose3D, Puzzle, Puzzle2D, Puzzle3D, Solution2D,
    Solution3D,
};
use crate::geometry::{Point2, RigidTransform2};

use super::obj::read_obj;
use super::solution::{parse_solution, AnySolution};

pub const GT_FILE: &str = "ground_truth.txt";
pub const GT_HEADER: &str = "# repair-2d-gt v1";

/// Which raster point a dataset's `(x, y)` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pivot {
    #[default]
    Center,
    TopLeft,
}

/// Conventions for reading ground-truth files.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadOptions {
    /// Reject lines that are not exactly `id x y theta`. Lenient mode
    /// accepts comma separators and ignores trailing columns.
    pub strict: bool,
    pub pivot: Pivot,
    /// The file uses image coordinates (y down, clockwise-positive angles).
    pub y_down: bool,
    pub px_per_mm: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            strict: true,
            pivot: Pivot::Center,
            y_down: false,
            px_per_mm: 1.0,
        }
    }
}

impl LoadOptions {
    pub fn lenient() -> Self {
        LoadOptions {
            strict: false,
            ..Default::default()
        }
    }
}

fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let matches = path
            .extension()
            .is_some_and(|e| e.to_string_lossy().eq_ignore_ascii_case(ext));
        if matches && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn group_name(dir: &Path) -> String {
    dir.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "group".into())
}

#[derive(Debug, Default)]
struct GtFile {
    rows: Vec<(String, [f64; 3], usize)>,
    canvas: Option<Canvas>,
    neighbor_tau: Option<f64>,
}

fn parse_gt_2d(text: &str, path: &Path, strict: bool) -> Result<GtFile> {
    let mut out = GtFile::default();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut it = comment.split_whitespace();
            let key = it.next();
            if key == Some("neighbor_tau") {
                out.neighbor_tau = it.next().and_then(|t| t.parse().ok()).filter(|v: &f64| *v > 0.0);
            }
            if key == Some("canvas") {
                let vals: Vec<f64> = it.filter_map(|t| t.parse().ok()).collect();
                if vals.len() == 2 && vals.iter().all(|v| *v > 0.0) {
                    out.canvas = Some(Canvas {
                        width: vals[0],
                        height: vals[1],
                    });
                }
            }
            continue;
        }
        let fields: Vec<&str> = if strict {
            line.split_whitespace().collect()
        } else {
            line.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
                .filter(|t| !t.is_empty())
                .collect()
        };
        if strict && fields.len() != 4 {
            return Err(Error::format(
                path,
                line_no,
                format!("expected `id x y theta`, found {} columns", fields.len()),
            ));
        }
        if fields.len() < 4 {
            return Err(Error::format(path, line_no, "too few columns"));
        }
        let mut vals = [0.0f64; 3];
        for (v, t) in vals.iter_mut().zip(&fields[1..4]) {
            *v = t
                .parse()
                .map_err(|e| Error::format(path, line_no, format!("bad number {t:?}: {e}")))?;
            if !v.is_finite() {
                return Err(Error::format(path, line_no, "non-finite value"));
            }
        }
        let id = fields[0].to_owned();
        if !seen.insert(id.clone()) {
            return Err(Error::format(path, line_no, format!("duplicate id {id}")));
        }
        out.rows.push((id, vals, line_no));
    }
    Ok(out)
}

fn to_internal(vals: [f64; 3], frag: &Fragment2D, opts: &LoadOptions) -> Pose2D {
    let [mut x, mut y, mut theta] = vals;
    if opts.y_down {
        y = -y;
        theta = -theta;
    }
    if opts.pivot == Pivot::TopLeft {
        let half = Point2::new(frag.width() as f64 / 2.0, -(frag.height() as f64) / 2.0);
        let off = RigidTransform2::new(theta, 0.0, 0.0).rotate(half);
        x += off.x;
        y += off.y;
    }
    Pose2D::new(x, y, theta)
}

pub fn load_group_2d(dir: &Path, opts: &LoadOptions) -> Result<Puzzle2D> {
    let pngs = files_with_ext(dir, "png")?;
    let group_id = group_name(dir);
    if pngs.len() < 2 {
        return Err(Error::InvalidPuzzle(format!(
            "{}: {} fragment image(s), need at least 2",
            dir.display(),
            pngs.len()
        )));
    }
    let mut fragments = Vec::with_capacity(pngs.len());
    for path in &pngs {
        let img = image::open(path)
            .map_err(|source| Error::Image {
                path: path.clone(),
                source,
            })?
            .into_rgba8();
        fragments.push(Fragment2D::new(stem(path), img, opts.px_per_mm)?);
    }
    fragments.sort_by(|a, b| a.id().cmp(b.id()));

    let gt_path = dir.join(GT_FILE);
    let mut tau = None;
    let (ground_truth, canvas) = if gt_path.is_file() {
        let text = std::fs::read_to_string(&gt_path).map_err(|e| Error::io(&gt_path, e))?;
        let gt = parse_gt_2d(&text, &gt_path, opts.strict)?;
        let mut sol = Solution2D::new();
        for (id, vals, line_no) in &gt.rows {
            let Ok(idx) = fragments.binary_search_by(|f| f.id().cmp(id)) else {
                return Err(Error::format(
                    &gt_path,
                    *line_no,
                    format!("id {id} has no matching fragment image"),
                ));
            };
            sol.insert(id.clone(), to_internal(*vals, &fragments[idx], opts));
        }
        if let Some(f) = fragments.iter().find(|f| sol.get(f.id()).is_none()) {
            return Err(Error::InvalidPuzzle(format!(
                "{}: fragment {} has no ground-truth pose",
                gt_path.display(),
                f.id()
            )));
        }
        tau = gt.neighbor_tau;
        (Some(sol), gt.canvas)
    } else {
        log::warn!(
            "{}: no {GT_FILE}; loading without ground truth (metrics disabled)",
            dir.display()
        );
        (None, None)
    };
    let mut puzzle = Puzzle2D::new(group_id, fragments, ground_truth, canvas)?;
    puzzle.neighbor_tau = tau;
    Ok(puzzle)
}

/// Writes `<id>.png` per fragment and the ground truth (if any).
pub fn save_group_2d(puzzle: &Puzzle2D, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for f in &puzzle.fragments {
        let path = dir.join(format!("{}.png", f.id()));
        let tmp = dir.join(format!(".{}.tmp.png", f.id()));
        f.rgba().save(&tmp).map_err(|source| Error::Image {
            path: tmp.clone(),
            source,
        })?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    }
    if let Some(gt) = &puzzle.ground_truth {
        let mut text = String::from(GT_HEADER);
        text.push('\n');
        let _ = writeln!(text, "# canvas {} {}", puzzle.canvas.width, puzzle.canvas.height);
        if let Some(tau) = puzzle.neighbor_tau {
            let _ = writeln!(text, "# neighbor_tau {tau}");
        }
        for (id, p) in &gt.poses {
            let _ = writeln!(text, "{id} {} {} {}", p.x, p.y, p.theta_deg);
        }
        super::write_atomic(&dir.join(GT_FILE), text.as_bytes())?;
    }
    Ok(())
}

pub fn load_group_3d(dir: &Path) -> Result<Puzzle3D> {
    let objs = files_with_ext(dir, "obj")?;
    let fragments = objs
        .iter()
        .map(|p| read_obj(p))
        .collect::<Result<Vec<Fragment3D>>>()?;
    let gt_path = dir.join(GT_FILE);
    let gt = if gt_path.is_file() {
        let text = std::fs::read_to_string(&gt_path).map_err(|e| Error::io(&gt_path, e))?;
        match parse_solution(&text, &gt_path)? {
            AnySolution::Solid(s) => s,
            AnySolution::Flat(s) if s.is_empty() => identity_gt(&fragments),
            AnySolution::Flat(_) => {
                return Err(Error::format(&gt_path, 0, "3D group with a 2D ground truth"))
            }
        }
    } else {
        // Meshes ship in assembled position.
        identity_gt(&fragments)
    };
    Puzzle3D::new(group_name(dir), fragments, Some(gt))
}

fn identity_gt(fragments: &[Fragment3D]) -> Solution3D {
    Solution3D::from_poses(fragments.iter().map(|f| (f.id.clone(), Pose3D::IDENTITY)))
}

pub fn detect_dimension(dir: &Path) -> Result<crate::fragments::Dimension> {
    use crate::fragments::Dimension;
    if !files_with_ext(dir, "obj")?.is_empty() {
        Ok(Dimension::Three)
    } else {
        Ok(Dimension::Two)
    }
}

pub fn load_group(dir: &Path, opts: &LoadOptions) -> Result<Puzzle> {
    match detect_dimension(dir)? {
        crate::fragments::Dimension::Three => Ok(Puzzle::Solid(load_group_3d(dir)?)),
        crate::fragments::Dimension::Two => Ok(Puzzle::Flat(load_group_2d(dir, opts)?)),
    }
}

/// Group directories under `root` (or `root` itself if it is one), sorted.
pub fn list_groups(root: &Path) -> Result<Vec<PathBuf>> {
    let is_group = |d: &Path| -> Result<bool> {
        Ok(!files_with_ext(d, "png")?.is_empty() || !files_with_ext(d, "obj")?.is_empty())
    };
    if is_group(root)? {
        return Ok(vec![root.to_path_buf()]);
    }
    let rd = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut out = Vec::new();
    for entry in rd {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() && is_group(&path)? {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Bitmask;

    fn frag(id: &str, w: usize, h: usize) -> Fragment2D {
        Fragment2D::from_mask(id, &Bitmask::from_fn(w, h, |x, y| x + y > 1), [50, 60, 70]).unwrap()
    }

    #[test]
    fn strict_rejects_extra_columns() {
        let err = parse_gt_2d("a 1 2 3\nb 1 2 3 4\n", Path::new("gt.txt"), true).unwrap_err();
        assert!(err.to_string().contains("gt.txt:2:"), "{err}");
        let ok = parse_gt_2d("a,1,2,3,extra\n", Path::new("gt.txt"), false).unwrap();
        assert_eq!(ok.rows[0].1, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn canvas_comment_parsed() {
        let gt = parse_gt_2d("# repair-2d-gt v1\n# canvas 64 32\na 1 2 3\n", Path::new("g"), true).unwrap();
        assert_eq!(gt.canvas, Some(Canvas { width: 64.0, height: 32.0 }));
    }

    #[test]
    fn pivot_and_axis_conventions() {
        let f = frag("a", 10, 4);
        let opts = LoadOptions {
            pivot: Pivot::TopLeft,
            ..Default::default()
        };
        let p = to_internal([0.0, 0.0, 0.0], &f, &opts);
        assert_eq!((p.x, p.y), (5.0, -2.0));
        let p = to_internal([0.0, 0.0, 90.0], &f, &opts);
        assert!((p.x - 2.0).abs() < 1e-12 && (p.y - 5.0).abs() < 1e-12);
        let flipped = LoadOptions {
            y_down: true,
            ..Default::default()
        };
        let p = to_internal([3.0, 4.0, 30.0], &f, &flipped);
        assert_eq!((p.x, p.y, p.theta_deg), (3.0, -4.0, -30.0));
    }

    #[test]
    fn round_trip_and_gt_absent_mode() {
        let dir = tempfile::tempdir().unwrap();
        let mut gt = Solution2D::new();
        gt.insert("a", Pose2D::new(1.0 / 3.0, 2.5, 17.123456789123));
        gt.insert("b", Pose2D::new(-4.0, 1e-7, -179.5));
        let mut puzzle = Puzzle2D::new("g", vec![frag("a", 9, 7), frag("b", 5, 12)], Some(gt), None).unwrap();
        puzzle.neighbor_tau = Some(6.5);
        save_group_2d(&puzzle, dir.path()).unwrap();
        let back = load_group_2d(dir.path(), &LoadOptions::default()).unwrap();
        assert_eq!(back.fragments, puzzle.fragments);
        for (id, p) in &puzzle.ground_truth.as_ref().unwrap().poses {
            let q = back.ground_truth.as_ref().unwrap().get(id).unwrap();
            assert!((p.x - q.x).abs() <= 1e-9 && (p.y - q.y).abs() <= 1e-9);
            assert!((p.theta_deg - q.theta_deg).abs() <= 1e-9);
        }
        assert_eq!(back.canvas, puzzle.canvas);
        assert_eq!(back.neighbor_tau, Some(6.5));

        std::fs::remove_file(dir.path().join(GT_FILE)).unwrap();
        let no_gt = load_group_2d(dir.path(), &LoadOptions::default()).unwrap();
        assert!(no_gt.ground_truth.is_none());
    }

    #[test]
    fn single_fragment_directory_rejected() {
        let dir = tempfile::tempdir().unwrap();
        frag("a", 4, 4).rgba().save(dir.path().join("a.png")).unwrap();
        assert!(matches!(
            load_group_2d(dir.path(), &LoadOptions::default()),
            Err(Error::InvalidPuzzle(_))
        ));
    }

    #[test]
    fn id_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        frag("a", 4, 4).rgba().save(dir.path().join("a.png")).unwrap();
        frag("b", 4, 4).rgba().save(dir.path().join("b.png")).unwrap();
        std::fs::write(dir.path().join(GT_FILE), "a 0 0 0\nc 0 0 0\n").unwrap();
        let err = load_group_2d(dir.path(), &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("id c"), "{err}");
    }

    #[test]
    fn obj_group_defaults_to_identity() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("p.obj"), "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n").unwrap();
        std::fs::write(dir.path().join("q.obj"), "v 2 0 0\nv 3 0 0\nv 2 1 0\nv 2 0 1\n").unwrap();
        let Puzzle::Solid(p) = load_group(dir.path(), &LoadOptions::default()).unwrap() else {
            panic!("expected 3D group");
        };
        assert_eq!(p.fragments.len(), 2);
        assert_eq!(p.ground_truth.unwrap().get("q"), Some(&Pose3D::IDENTITY));
    }
}
