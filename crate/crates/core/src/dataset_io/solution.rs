//! Plain-text solution files.
//!
//! ```text
//! # repair-solution v1
//! # unplaced frag_004
//! frag_000 120.5 88 -12.25
//! ```
//!
//! 2D lines are `id x y theta_deg`; 3D lines are `id r11 .. r33 tx ty tz`.
//! Values are written with 9 significant digits.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::fragments::{Pose2D, Pose3D, Solution, Solution2D, Solution3D};

pub const SOLUTION_HEADER: &str = "# repair-solution v1";

#[derive(Debug, Clone, PartialEq)]
pub enum AnySolution {
    Flat(Solution2D),
    Solid(Solution3D),
}

/// `v` rounded to `digits` significant digits, printed in shortest form.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .expect("scientific notation parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn num(v: f64) -> String {
    format_sig(v, 9)
}

/// Write through a temporary sibling and rename into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn header_and_unplaced<P>(sol: &Solution<P>) -> String {
    let mut out = String::from(SOLUTION_HEADER);
    out.push('\n');
    for id in &sol.unplaced {
        let _ = writeln!(out, "# unplaced {id}");
    }
    out
}

pub fn format_solution_2d(sol: &Solution2D) -> String {
    let mut out = header_and_unplaced(sol);
    for (id, p) in &sol.poses {
        let _ = writeln!(out, "{id} {} {} {}", num(p.x), num(p.y), num(p.theta_deg));
    }
    out
}

pub fn format_solution_3d(sol: &Solution3D) -> String {
    let mut out = header_and_unplaced(sol);
    for (id, p) in &sol.poses {
        let r = &p.rotation;
        let _ = write!(out, "{id}");
        for i in 0..3 {
            for j in 0..3 {
                let _ = write!(out, " {}", num(r[(i, j)]));
            }
        }
        for v in p.translation.iter() {
            let _ = write!(out, " {}", num(*v));
        }
        out.push('\n');
    }
    out
}

pub fn save_solution_2d(sol: &Solution2D, path: &Path) -> Result<()> {
    write_atomic(path, format_solution_2d(sol).as_bytes())
}

pub fn save_solution_3d(sol: &Solution3D, path: &Path) -> Result<()> {
    write_atomic(path, format_solution_3d(sol).as_bytes())
}

/// Parses either dimension; the first pose line fixes which one.
pub fn parse_solution(text: &str, path: &Path) -> Result<AnySolution> {
    let mut unplaced = BTreeSet::new();
    let mut flat = Solution2D::new();
    let mut solid = Solution3D::new();
    let mut columns: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut it = comment.split_whitespace();
            if it.next() == Some("unplaced") {
                unplaced.extend(it.map(str::to_owned));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let n = fields.len();
        if n != 4 && n != 13 {
            return Err(Error::format(
                path,
                line_no,
                format!("expected 4 (2D) or 13 (3D) columns, found {n}"),
            ));
        }
        match columns {
            None => columns = Some(n),
            Some(c) if c != n => {
                return Err(Error::format(path, line_no, "mixed 2D and 3D pose lines"));
            }
            _ => {}
        }
        let id = fields[0].to_owned();
        let vals: Vec<f64> = fields[1..]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format(path, line_no, format!("bad number: {e}")))?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::format(path, line_no, "non-finite value"));
        }
        let duplicate = if n == 4 {
            flat.poses
                .insert(id.clone(), Pose2D::new(vals[0], vals[1], vals[2]))
                .is_some()
        } else {
            let rot = Matrix3::from_row_slice(&vals[..9]);
            let pose = Pose3D::new(rot, Vector3::new(vals[9], vals[10], vals[11]))
                .map_err(|e| Error::format(path, line_no, e.to_string()))?;
            solid.poses.insert(id.clone(), pose).is_some()
        };
        if duplicate {
            return Err(Error::format(path, line_no, format!("duplicate id {id}")));
        }
    }
    Ok(match columns {
        Some(13) => {
            solid.unplaced = unplaced;
            AnySolution::Solid(solid)
        }
        _ => {
            flat.unplaced = unplaced;
            AnySolution::Flat(flat)
        }
    })
}

pub fn load_solution(path: &Path) -> Result<AnySolution> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_solution(&text, path)
}

pub fn load_solution_2d(path: &Path) -> Result<Solution2D> {
    match load_solution(path)? {
        AnySolution::Flat(s) => Ok(s),
        AnySolution::Solid(_) => Err(Error::format(path, 0, "expected a 2D solution")),
    }
}

pub fn load_solution_3d(path: &Path) -> Result<Solution3D> {
    match load_solution(path)? {
        AnySolution::Solid(s) => Ok(s),
        AnySolution::Flat(s) if s.is_empty() => Ok(Solution3D {
            poses: Default::default(),
            unplaced: s.unplaced,
        }),
        AnySolution::Flat(_) => Err(Error::format(path, 0, "expected a 3D solution")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(123.456789012, 9), "123.456789");
        assert_eq!(format_sig(-0.000123456789123, 9), "-0.000123456789");
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(180.0, 9), "180");
    }

    #[test]
    fn identity_3d_line_parses_orthonormal() {
        let text = "a 1 0 0 0 1 0 0 0 1 0 0 0\nb 0 -1 0 1 0 0 0 0 1 1 2 3\n";
        let AnySolution::Solid(s) = parse_solution(text, Path::new("s.txt")).unwrap() else {
            panic!("expected 3D");
        };
        assert_eq!(s.get("a").unwrap().rotation, Matrix3::identity());
        assert!(s.get("b").unwrap().validate().is_ok());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = parse_solution("a 1 2 3\na 4 5 6\n", Path::new("s.txt")).unwrap_err();
        assert!(err.to_string().contains("duplicate id a"));
        assert!(err.to_string().contains(":2:"));
    }

    #[test]
    fn bad_rows_rejected() {
        assert!(parse_solution("a 1 2\n", Path::new("s")).is_err());
        assert!(parse_solution("a 1 2 x\n", Path::new("s")).is_err());
        assert!(parse_solution("a 1 2 3\nb 1 0 0 0 1 0 0 0 1 0 0 0\n", Path::new("s")).is_err());
        assert!(parse_solution("a 2 0 0 0 1 0 0 0 1 0 0 0\n", Path::new("s")).is_err());
    }

    #[test]
    fn unplaced_comments_round_trip() {
        let mut s = Solution2D::new();
        s.insert("a", Pose2D::new(1.0, 2.0, 3.0));
        s.insert("b", Pose2D::new(1e6, 1e6, 0.0));
        s.unplaced.insert("b".into());
        let text = format_solution_2d(&s);
        assert_eq!(parse_solution(&text, Path::new("s")).unwrap(), AnySolution::Flat(s));
    }

    proptest! {
        #[test]
        fn round_trip_within_printed_precision(
            poses in proptest::collection::vec((-5e3..5e3f64, -5e3..5e3f64, -180.0..180.0f64), 5)
        ) {
            let mut s = Solution2D::new();
            for (i, (x, y, t)) in poses.iter().enumerate() {
                s.insert(format!("f{i}"), Pose2D::new(*x, *y, *t));
            }
            let AnySolution::Flat(back) = parse_solution(&format_solution_2d(&s), Path::new("s")).unwrap() else {
                panic!("dimension changed");
            };
            for (id, p) in &s.poses {
                let q = back.get(id).unwrap();
                let tol = |v: f64| 1e-6 * v.abs().max(1.0);
                prop_assert!((p.x - q.x).abs() <= tol(p.x));
                prop_assert!((p.y - q.y).abs() <= tol(p.y));
                prop_assert!(crate::geometry::normalize_deg(p.theta_deg - q.theta_deg).abs() <= tol(p.theta_deg));
            }
        }
    }
}
