//! Geometric primitives shared by the solvers, the generator and the metrics.
//!
//! All 2D geometry lives in a Y-up plane. Angles are stored in degrees and
//! normalized to (-180, 180]; positive angles turn counter-clockwise.

mod curvature;
mod procrustes;
pub mod raster;
mod simplify;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use curvature::discrete_curvature;
pub use procrustes::{
    procrustes_two_point, procrustes_two_point_iterative, spring_energy, SpringSolver,
};
pub use raster::{convex_hull, min_area_rect, raster_intersection_area, Bitmask, CellRect, IntersectionArea, PlacedMask};
pub use simplify::{douglas_peucker, douglas_peucker_indices, point_segment_distance};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Ordered vertex chain. Closed chains do not repeat the first vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point2>,
    closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Point2>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "polyline needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite vertex {p:?}")));
        }
        let n = points.len();
        let pairs = if closed { n } else { n - 1 };
        for i in 0..pairs {
            let (a, b) = (points[i], points[(i + 1) % n]);
            if a == b {
                return Err(Error::InvalidInput(format!(
                    "consecutive vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(Polyline { points, closed })
    }

    pub fn open(points: Vec<Point2>) -> Result<Self> {
        Self::new(points, false)
    }

    pub fn closed(points: Vec<Point2>) -> Result<Self> {
        Self::new(points, true)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    /// Total length, including the closing edge for closed chains.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        let mut total: f64 = self.points.windows(2).map(|w| w[0].distance(w[1])).sum();
        if self.closed {
            total += self.points[n - 1].distance(self.points[0]);
        }
        total
    }

    /// Shoelace signed area; positive for counter-clockwise closed chains.
    pub fn signed_area(&self) -> f64 {
        polygon_signed_area(&self.points)
    }
}

pub fn polygon_signed_area(points: &[Point2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += points[i].cross(points[(i + 1) % n]);
    }
    0.5 * acc
}

/// Wrap an angle in degrees into (-180, 180].
pub fn normalize_deg(angle: f64) -> f64 {
    let r = angle.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90.
pub fn sin_cos_deg(angle: f64) -> (f64, f64) {
    let a = normalize_deg(angle);
    if a == 0.0 {
        (0.0, 1.0)
    } else if a == 90.0 {
        (1.0, 0.0)
    } else if a == 180.0 {
        (0.0, -1.0)
    } else if a == -90.0 {
        (-1.0, 0.0)
    } else {
        a.to_radians().sin_cos()
    }
}

/// Circular mean of two angles in degrees.
pub fn circular_mean_deg(a: f64, b: f64) -> f64 {
    let (sa, ca) = sin_cos_deg(a);
    let (sb, cb) = sin_cos_deg(b);
    let (s, c) = (sa + sb, ca + cb);
    if s.abs() < 1e-15 && c.abs() < 1e-15 {
        // Antipodal inputs have no circular mean; fall back to the bisector
        // obtained by walking half the signed difference from `a`.
        return normalize_deg(a + 0.5 * normalize_deg(b - a));
    }
    normalize_deg(s.atan2(c).to_degrees())
}

/// Proper rigid motion `p -> R(theta) p + t` of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform2 {
    pub theta_deg: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Default for RigidTransform2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RigidTransform2 {
    pub const IDENTITY: RigidTransform2 = RigidTransform2 {
        theta_deg: 0.0,
        tx: 0.0,
        ty: 0.0,
    };

    pub fn new(theta_deg: f64, tx: f64, ty: f64) -> Self {
        RigidTransform2 {
            theta_deg: normalize_deg(theta_deg),
            tx,
            ty,
        }
    }

    pub fn translation(&self) -> Point2 {
        Point2::new(self.tx, self.ty)
    }

    pub fn rotate(&self, p: Point2) -> Point2 {
        let (s, c) = sin_cos_deg(self.theta_deg);
        Point2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let r = self.rotate(p);
        Point2::new(r.x + self.tx, r.y + self.ty)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform2) -> RigidTransform2 {
        let t = self.apply(other.translation());
        RigidTransform2::new(self.theta_deg + other.theta_deg, t.x, t.y)
    }

    pub fn inverse(&self) -> RigidTransform2 {
        let back = RigidTransform2::new(-self.theta_deg, 0.0, 0.0);
        let t = back.rotate(self.translation());
        RigidTransform2::new(-self.theta_deg, -t.x, -t.y)
    }
}

pub fn compose(a: &RigidTransform2, b: &RigidTransform2) -> RigidTransform2 {
    a.compose(b)
}

pub fn invert(a: &RigidTransform2) -> RigidTransform2 {
    a.inverse()
}

pub fn apply(a: &RigidTransform2, p: Point2) -> Point2 {
    a.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn polyline_validation() {
        assert!(Polyline::open(vec![Point2::ORIGIN]).is_err());
        assert!(Polyline::open(vec![Point2::ORIGIN, Point2::ORIGIN]).is_err());
        let closing_dup = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 0.0),
        ];
        assert!(Polyline::closed(closing_dup).is_err());
        assert!(Polyline::open(vec![Point2::new(f64::NAN, 0.0), Point2::ORIGIN]).is_err());
    }

    #[test]
    fn normalize_range() {
        assert_eq!(normalize_deg(180.0), 180.0);
        assert_eq!(normalize_deg(-180.0), 180.0);
        assert_eq!(normalize_deg(540.0), 180.0);
        assert_eq!(normalize_deg(350.0), -10.0);
        assert_eq!(normalize_deg(-190.0), 170.0);
    }

    #[test]
    fn identity_inverse() {
        assert_eq!(RigidTransform2::IDENTITY.inverse(), RigidTransform2::IDENTITY);
        let a = RigidTransform2::new(37.0, 4.0, -2.5);
        let id = a.compose(&a.inverse());
        assert_abs_diff_eq!(id.theta_deg, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(id.tx, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(id.ty, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_thirty_degrees() {
        let t = RigidTransform2::new(30.0, 1.0, 2.0);
        let p = t.apply(Point2::new(1.0, 0.0));
        let r = 30f64.to_radians();
        assert_abs_diff_eq!(p.x, r.cos() + 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, r.sin() + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn circular_mean_wraps() {
        assert_abs_diff_eq!(circular_mean_deg(170.0, -170.0), 180.0, epsilon = 1e-9);
        assert_abs_diff_eq!(circular_mean_deg(10.0, 30.0), 20.0, epsilon = 1e-9);
        assert_abs_diff_eq!(circular_mean_deg(-10.0, 10.0), 0.0, epsilon = 1e-9);
    }

    fn transform() -> impl Strategy<Value = RigidTransform2> {
        (-360.0..360.0f64, -100.0..100.0f64, -100.0..100.0f64)
            .prop_map(|(a, x, y)| RigidTransform2::new(a, x, y))
    }

    fn point() -> impl Strategy<Value = Point2> {
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn group_axioms(a in transform(), b in transform(), c in transform(), p in point()) {
            let lhs = a.compose(&b).apply(p);
            let rhs = a.apply(b.apply(p));
            prop_assert!((lhs - rhs).norm() < 1e-9);

            let back = a.inverse().apply(a.apply(p));
            prop_assert!((back - p).norm() < 1e-9);

            let left = a.compose(&b).compose(&c).apply(p);
            let right = a.compose(&b.compose(&c)).apply(p);
            prop_assert!((left - right).norm() < 1e-9);
        }
    }
}
