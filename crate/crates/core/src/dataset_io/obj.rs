use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::fragments::Fragment3D;

/// Vertex positions (and optional per-vertex colours) from OBJ text.
/// Everything other than `v` records is ignored.
pub fn parse_obj_vertices(text: &str, path: &Path) -> Result<(Vec<Point3<f64>>, Option<Vec<[u8; 3]>>)> {
    let mut points = Vec::new();
    let mut colors = Vec::new();
    let mut all_colored = true;
    for (i, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            continue;
        }
        let vals: Vec<f64> = it
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format(path, i + 1, format!("bad vertex record: {e}")))?;
        if vals.len() < 3 {
            return Err(Error::format(path, i + 1, "vertex record needs 3 coordinates"));
        }
        points.push(Point3::new(vals[0], vals[1], vals[2]));
        if vals.len() >= 6 {
            let c = |v: f64| {
                let v = if v <= 1.0 { v * 255.0 } else { v };
                v.round().clamp(0.0, 255.0) as u8
            };
            colors.push([c(vals[3]), c(vals[4]), c(vals[5])]);
        } else {
            all_colored = false;
        }
    }
    let colors = (all_colored && !colors.is_empty()).then_some(colors);
    Ok((points, colors))
}

pub fn read_obj(path: &Path) -> Result<Fragment3D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (points, colors) = parse_obj_vertices(&text, path)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Fragment3D { id, points, colors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_only() {
        let text = "# comment\nmtllib a.mtl\nv 1 2 3\nvt 0.5 0.5\nv -1.5 0 2e1 1 0 0\nf 1 2 3\n";
        let (pts, colors) = parse_obj_vertices(text, Path::new("x.obj")).unwrap();
        assert_eq!(pts, vec![Point3::new(1.0, 2.0, 3.0), Point3::new(-1.5, 0.0, 20.0)]);
        assert!(colors.is_none());
    }

    #[test]
    fn bad_vertex_names_line() {
        let err = parse_obj_vertices("v 1 2\n", Path::new("x.obj")).unwrap_err();
        assert!(err.to_string().contains(":1:"));
    }
}
