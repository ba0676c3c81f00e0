use super::Polyline;

/// Signed per-vertex curvature: turning angle (radians, positive for left
/// turns) divided by the mean length of the two adjacent edges.
///
/// Open chains get zero curvature at both endpoints.
pub fn discrete_curvature(line: &Polyline) -> Vec<f64> {
    let pts = line.points();
    let n = pts.len();
    let mut out = vec![0.0; n];
    for (i, k) in out.iter_mut().enumerate() {
        let (prev, next) = if line.is_closed() {
            ((i + n - 1) % n, (i + 1) % n)
        } else if i == 0 || i == n - 1 {
            continue;
        } else {
            (i - 1, i + 1)
        };
        if prev == i || next == i || prev == next {
            continue;
        }
        let e_in = pts[i] - pts[prev];
        let e_out = pts[next] - pts[i];
        let turn = e_in.cross(e_out).atan2(e_in.dot(e_out));
        let mean_len = 0.5 * (e_in.norm() + e_out.norm());
        *k = turn / mean_len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn regular_polygon(sides: usize, side: f64) -> Vec<Point2> {
        let circumradius = side / (2.0 * (PI / sides as f64).sin());
        (0..sides)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / sides as f64;
                Point2::new(circumradius * a.cos(), circumradius * a.sin())
            })
            .collect()
    }

    #[test]
    fn hexagon_turning_angle() {
        let hex = Polyline::closed(regular_polygon(6, 1.0)).unwrap();
        for k in discrete_curvature(&hex) {
            assert_abs_diff_eq!(k.abs(), PI / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_square_corners() {
        let sq = Polyline::closed(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        for k in discrete_curvature(&sq) {
            assert_abs_diff_eq!(k, PI / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn straight_segment_is_flat() {
        let pts: Vec<_> = (0..6).map(|i| Point2::new(i as f64 * 0.5, 1.0)).collect();
        let k = discrete_curvature(&Polyline::open(pts).unwrap());
        assert!(k.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mirror_flips_sign() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.5),
            Point2::new(4.0, 3.0),
            Point2::new(1.0, 4.0),
            Point2::new(-1.0, 2.0),
        ];
        let mirrored: Vec<_> = pts.iter().map(|p| Point2::new(-p.x, p.y)).collect();
        let a = discrete_curvature(&Polyline::closed(pts).unwrap());
        let b = discrete_curvature(&Polyline::closed(mirrored).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(*x, -*y, epsilon = 1e-12);
        }
    }
}
