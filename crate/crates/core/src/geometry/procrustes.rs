//! Rigid alignment of two point pairs.
//!
//! Two springs tie the endpoints of a source segment to the endpoints of a
//! target segment; the rigid pose minimizing the total spring energy has a
//! closed form. An iterative relaxation of the same energy is kept for
//! cross-checking.

use super::{Point2, RigidTransform2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpringSolver {
    #[default]
    ClosedForm,
    Iterative,
}

impl SpringSolver {
    pub fn solve(self, src: [Point2; 2], dst: [Point2; 2]) -> Result<RigidTransform2> {
        match self {
            SpringSolver::ClosedForm => procrustes_two_point(src[0], src[1], dst[0], dst[1]),
            SpringSolver::Iterative => {
                procrustes_two_point_iterative(src[0], src[1], dst[0], dst[1])
            }
        }
    }
}

/// Sum of squared spring extensions after moving the source points by `t`.
pub fn spring_energy(t: &RigidTransform2, src: [Point2; 2], dst: [Point2; 2]) -> f64 {
    src.iter()
        .zip(&dst)
        .map(|(s, d)| (t.apply(*s) - *d).norm_squared())
        .sum()
}

fn check_distinct(src1: Point2, src2: Point2) -> Result<()> {
    if src1.distance(src2) <= 1e-12 {
        return Err(Error::Degenerate(format!(
            "coincident source points {src1:?} and {src2:?}"
        )));
    }
    Ok(())
}

/// Rotation + translation minimizing `|T(src1)-dst1|^2 + |T(src2)-dst2|^2`.
pub fn procrustes_two_point(
    src1: Point2,
    src2: Point2,
    dst1: Point2,
    dst2: Point2,
) -> Result<RigidTransform2> {
    check_distinct(src1, src2)?;
    let us = src2 - src1;
    let ud = dst2 - dst1;
    let theta = if ud.norm_squared() == 0.0 {
        0.0
    } else {
        us.cross(ud).atan2(us.dot(ud)).to_degrees()
    };
    let rot = RigidTransform2::new(theta, 0.0, 0.0);
    let t = dst1.midpoint(dst2) - rot.rotate(src1.midpoint(src2));
    Ok(RigidTransform2::new(theta, t.x, t.y))
}

/// Same optimum reached by preconditioned gradient descent on the spring
/// energy, rotating the body about its centroid.
pub fn procrustes_two_point_iterative(
    src1: Point2,
    src2: Point2,
    dst1: Point2,
    dst2: Point2,
) -> Result<RigidTransform2> {
    check_distinct(src1, src2)?;
    let center = src1.midpoint(src2);
    let arms = [src1 - center, src2 - center];
    let dst = [dst1, dst2];
    let inertia: f64 = 2.0 * arms.iter().map(|a| a.norm_squared()).sum::<f64>();

    let energy = |theta: f64, d: Point2| -> f64 {
        let (s, c) = theta.sin_cos();
        arms.iter()
            .zip(&dst)
            .map(|(a, q)| {
                let p = Point2::new(c * a.x - s * a.y, s * a.x + c * a.y) + center + d;
                (p - *q).norm_squared()
            })
            .sum()
    };

    let mut theta = 0.0f64;
    let mut disp = Point2::ORIGIN;
    let mut e = energy(theta, disp);
    for _ in 0..10_000 {
        let (s, c) = theta.sin_cos();
        let mut g_theta = 0.0;
        let mut g_disp = Point2::ORIGIN;
        for (a, q) in arms.iter().zip(&dst) {
            let ra = Point2::new(c * a.x - s * a.y, s * a.x + c * a.y);
            let r = ra + center + disp - *q;
            g_disp = g_disp + r * 2.0;
            g_theta += 2.0 * r.dot(Point2::new(-ra.y, ra.x));
        }
        let mut step = 1.0;
        let (mut next_theta, mut next_disp, mut next_e);
        loop {
            next_theta = theta - step * g_theta / inertia;
            next_disp = disp - g_disp * (step / 4.0);
            next_e = energy(next_theta, next_disp);
            if next_e <= e || step < 1e-12 {
                break;
            }
            step *= 0.5;
        }
        let moved = (next_theta - theta).abs() + (next_disp - disp).norm();
        theta = next_theta;
        disp = next_disp;
        e = next_e;
        if moved < 1e-15 {
            break;
        }
    }
    let rot = RigidTransform2::new(theta.to_degrees(), 0.0, 0.0);
    let t = center + disp - rot.rotate(center);
    Ok(RigidTransform2::new(theta.to_degrees(), t.x, t.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_when_points_match() {
        let (a, b) = (Point2::new(1.0, 2.0), Point2::new(-3.0, 5.0));
        let t = procrustes_two_point(a, b, a, b).unwrap();
        assert_abs_diff_eq!(t.theta_deg, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.tx, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.ty, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quarter_turn_about_origin() {
        let (a, b) = (Point2::new(1.0, 0.0), Point2::new(3.0, 1.0));
        let rot = RigidTransform2::new(90.0, 0.0, 0.0);
        let t = procrustes_two_point(a, b, rot.apply(a), rot.apply(b)).unwrap();
        assert_abs_diff_eq!(t.theta_deg, 90.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.tx, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.ty, 0.0, epsilon = 1e-12);
        assert!(spring_energy(&t, [a, b], [rot.apply(a), rot.apply(b)]) < 1e-20);
    }

    #[test]
    fn coincident_source_rejected() {
        let p = Point2::new(1.0, 1.0);
        assert!(matches!(
            procrustes_two_point(p, p, Point2::ORIGIN, Point2::new(1.0, 0.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn residual_is_half_length_mismatch_squared() {
        let src = [Point2::new(0.0, 0.0), Point2::new(4.0, 0.0)];
        let dst = [Point2::new(10.0, 10.0), Point2::new(10.0, 16.0)];
        let t = procrustes_two_point(src[0], src[1], dst[0], dst[1]).unwrap();
        assert_abs_diff_eq!(spring_energy(&t, src, dst), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn iterative_agrees_with_closed_form() {
        let src = [Point2::new(-3.0, 2.0), Point2::new(7.5, -1.0)];
        let dst = [Point2::new(20.0, 4.0), Point2::new(18.0, 15.0)];
        let a = SpringSolver::ClosedForm.solve(src, dst).unwrap();
        let b = SpringSolver::Iterative.solve(src, dst).unwrap();
        assert_abs_diff_eq!(a.theta_deg, b.theta_deg, epsilon = 1e-7);
        assert_abs_diff_eq!(a.tx, b.tx, epsilon = 1e-7);
        assert_abs_diff_eq!(a.ty, b.ty, epsilon = 1e-7);
    }
}
