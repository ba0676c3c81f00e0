//! Ramer-Douglas-Peucker polyline simplification.

use super::{Point2, Polyline};
use crate::error::{Error, Result};

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_squared();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Marks kept vertices of `points[first..=last]` (both ends assumed kept).
fn mark_range(points: &[Point2], first: usize, last: usize, epsilon: f64, keep: &mut [bool]) {
    let mut stack = vec![(first, last)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (a, b) = (points[lo], points[hi % points.len()]);
        let mut worst = (lo, -1.0);
        for (i, p) in points.iter().enumerate().take(hi).skip(lo + 1) {
            let d = point_segment_distance(*p, a, b);
            if d > worst.1 {
                worst = (i, d);
            }
        }
        if worst.1 > epsilon {
            keep[worst.0] = true;
            stack.push((lo, worst.0));
            stack.push((worst.0, hi));
        }
    }
}

/// Indices of the vertices retained by Douglas-Peucker, in input order.
///
/// Closed chains are split at vertex 0 and the vertex farthest from it, and
/// each half is simplified independently. `epsilon == 0` keeps every vertex.
pub fn douglas_peucker_indices(line: &Polyline, epsilon: f64) -> Result<Vec<usize>> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    let pts = line.points();
    let n = pts.len();
    if epsilon == 0.0 || n <= 2 {
        return Ok((0..n).collect());
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    if line.is_closed() {
        let far = (1..n)
            .max_by(|&i, &j| {
                pts[i]
                    .distance(pts[0])
                    .total_cmp(&pts[j].distance(pts[0]))
                    .then(j.cmp(&i))
            })
            .unwrap_or(1);
        keep[far] = true;
        mark_range(pts, 0, far, epsilon, &mut keep);
        // Second half wraps back to vertex 0, addressed as index n.
        let mut wrapped = pts.to_vec();
        wrapped.push(pts[0]);
        let mut keep_wrapped = keep.clone();
        keep_wrapped.push(true);
        mark_range(&wrapped, far, n, epsilon, &mut keep_wrapped);
        keep.copy_from_slice(&keep_wrapped[..n]);
    } else {
        keep[n - 1] = true;
        mark_range(pts, 0, n - 1, epsilon, &mut keep);
    }
    Ok((0..n).filter(|&i| keep[i]).collect())
}

pub fn douglas_peucker(line: &Polyline, epsilon: f64) -> Result<Polyline> {
    let idx = douglas_peucker_indices(line, epsilon)?;
    let pts = idx.iter().map(|&i| line.points()[i]).collect();
    Polyline::new(pts, line.is_closed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_collapse() {
        let line = Polyline::open(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ])
        .unwrap();
        let s = douglas_peucker(&line, 0.1).unwrap();
        assert_eq!(s.points(), &[Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)]);
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let pts: Vec<_> = (0..20)
            .map(|i| Point2::new(i as f64, ((i * 7) % 5) as f64 * 0.01))
            .collect();
        let line = Polyline::open(pts).unwrap();
        assert_eq!(douglas_peucker(&line, 0.0).unwrap(), line);
    }

    #[test]
    fn negative_epsilon_rejected() {
        let line = Polyline::open(vec![Point2::ORIGIN, Point2::new(1.0, 1.0)]).unwrap();
        assert!(douglas_peucker(&line, -1.0).is_err());
    }

    #[test]
    fn closed_square_keeps_corners() {
        let mut pts = Vec::new();
        for i in 0..10 {
            pts.push(Point2::new(i as f64, 0.0));
        }
        for i in 0..10 {
            pts.push(Point2::new(10.0, i as f64));
        }
        for i in 0..10 {
            pts.push(Point2::new(10.0 - i as f64, 10.0));
        }
        for i in 0..10 {
            pts.push(Point2::new(0.0, 10.0 - i as f64));
        }
        let line = Polyline::closed(pts).unwrap();
        let s = douglas_peucker(&line, 0.5).unwrap();
        assert!(s.is_closed());
        assert_eq!(s.len(), 4);
        assert!((s.signed_area() - 100.0).abs() < 1e-12);
    }
}
