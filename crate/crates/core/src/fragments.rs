//! Fragment, pose and puzzle data model.
//!
//! A 2D fragment is an RGBA raster whose alpha channel defines its footprint.
//! Its local frame has the origin at the raster center and Y pointing up; a
//! [`Pose2D`] rotates the fragment about that center (counter-clockwise for
//! positive angles) and then translates it onto the canvas.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use image::RgbaImage;
use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_deg, Bitmask, PlacedMask, Point2, Polyline, RigidTransform2};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta_deg: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta_deg: f64) -> Self {
        Pose2D {
            x,
            y,
            theta_deg: normalize_deg(theta_deg),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta_deg.is_finite()
    }

    pub fn to_transform(&self) -> RigidTransform2 {
        RigidTransform2::new(self.theta_deg, self.x, self.y)
    }

    pub fn from_transform(t: &RigidTransform2) -> Self {
        Pose2D::new(t.tx, t.ty, t.theta_deg)
    }

    pub fn translation(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

impl From<RigidTransform2> for Pose2D {
    fn from(t: RigidTransform2) -> Self {
        Pose2D::from_transform(&t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose3D {
    pub rotation: Matrix3<f64>,
    /// Millimetres.
    pub translation: Vector3<f64>,
}

impl Default for Pose3D {
    fn default() -> Self {
        Pose3D::IDENTITY
    }
}

impl Pose3D {
    pub const IDENTITY: Pose3D = Pose3D {
        rotation: Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0),
        translation: Vector3::new(0.0, 0.0, 0.0),
    };

    /// Validates that `rotation` is orthonormal with determinant +1 (1e-6).
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let pose = Pose3D {
            rotation,
            translation,
        };
        pose.validate()?;
        Ok(pose)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.rotation;
        if !r.iter().chain(self.translation.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite 3D pose".into()));
        }
        let err = (r.transpose() * r - Matrix3::identity()).abs().max();
        let det = r.determinant();
        if err > 1e-6 || (det - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "rotation is not orthonormal (|RtR - I| = {err:.3e}, det = {det:.6})"
            )));
        }
        Ok(())
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Pose3D) -> Pose3D {
        Pose3D {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose3D {
        let rt = self.rotation.transpose();
        Pose3D {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn from_axis_angle_deg(axis: Vector3<f64>, angle_deg: f64, translation: Vector3<f64>) -> Self {
        let rot = nalgebra::Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(axis),
            angle_deg.to_radians(),
        );
        Pose3D {
            rotation: *rot.matrix(),
            translation,
        }
    }
}

/// Raster fragment: RGBA pixels plus the binary footprint `alpha > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment2D {
    id: String,
    rgba: RgbaImage,
    mask: Bitmask,
    px_per_mm: f64,
}

impl Fragment2D {
    pub fn new(id: impl Into<String>, rgba: RgbaImage, px_per_mm: f64) -> Result<Self> {
        let id = id.into();
        if !(px_per_mm > 0.0) || !px_per_mm.is_finite() {
            return Err(Error::InvalidInput(format!(
                "fragment {id}: px_per_mm must be > 0, got {px_per_mm}"
            )));
        }
        let (w, h) = rgba.dimensions();
        let mask = Bitmask::from_fn(w as usize, h as usize, |x, y| {
            rgba.get_pixel(x as u32, y as u32)[3] > 0
        });
        if mask.is_empty() {
            return Err(Error::InvalidInput(format!("fragment {id}: empty mask")));
        }
        Ok(Fragment2D {
            id,
            rgba,
            mask,
            px_per_mm,
        })
    }

    /// Solid-colour fragment from a mask; handy for synthetic fixtures.
    pub fn from_mask(id: impl Into<String>, mask: &Bitmask, color: [u8; 3]) -> Result<Self> {
        let rgba = RgbaImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
            if mask.get(x as usize, y as usize) {
                image::Rgba([color[0], color[1], color[2], 255])
            } else {
                image::Rgba([0, 0, 0, 0])
            }
        });
        Fragment2D::new(id, rgba, 1.0)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn rgba(&self) -> &RgbaImage {
        &self.rgba
    }

    pub fn mask(&self) -> &Bitmask {
        &self.mask
    }

    pub fn px_per_mm(&self) -> f64 {
        self.px_per_mm
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    /// Pixel count of the footprint.
    pub fn area_px(&self) -> u64 {
        self.mask.count_ones()
    }

    pub fn area_mm2(&self) -> f64 {
        self.area_px() as f64 / (self.px_per_mm * self.px_per_mm)
    }

    /// Footprint radius bound: half the raster diagonal.
    pub fn radius(&self) -> f64 {
        0.5 * (self.width() as f64).hypot(self.height() as f64)
    }

    /// Local coordinates of the center of pixel `(col, row)`.
    pub fn pixel_center(&self, col: usize, row: usize) -> Point2 {
        Point2::new(
            col as f64 + 0.5 - self.width() as f64 / 2.0,
            self.height() as f64 / 2.0 - row as f64 - 0.5,
        )
    }

    /// Replace the footprint, clearing alpha outside it. The new mask must
    /// be a non-empty subset of the raster.
    pub fn with_mask(&self, mask: Bitmask) -> Result<Self> {
        if mask.width() != self.width() || mask.height() != self.height() {
            return Err(Error::InvalidInput("mask size mismatch".into()));
        }
        let mut rgba = self.rgba.clone();
        for (x, y, px) in rgba.enumerate_pixels_mut() {
            if !mask.get(x as usize, y as usize) {
                *px = image::Rgba([0, 0, 0, 0]);
            }
        }
        Fragment2D::new(self.id.clone(), rgba, self.px_per_mm)
    }

    pub fn with_px_per_mm(mut self, px_per_mm: f64) -> Result<Self> {
        if !(px_per_mm > 0.0) {
            return Err(Error::InvalidInput("px_per_mm must be > 0".into()));
        }
        self.px_per_mm = px_per_mm;
        Ok(self)
    }
}

/// Canvas occupancy of `frag` under `pose` at native resolution.
pub fn place(frag: &Fragment2D, pose: &Pose2D) -> PlacedMask {
    PlacedMask::place(frag.mask(), &pose.to_transform(), 1.0)
}

/// Canvas occupancy with canvas cells of `cell` fragment pixels.
pub fn place_scaled(frag: &Fragment2D, pose: &Pose2D, cell: f64) -> PlacedMask {
    PlacedMask::place(frag.mask(), &pose.to_transform(), cell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaUnit {
    Pixels,
    Millimetres,
}

/// Footprint area in px² or mm².
pub fn fragment_area(frag: &Fragment2D, unit: AreaUnit) -> f64 {
    match unit {
        AreaUnit::Pixels => frag.area_px() as f64,
        AreaUnit::Millimetres => frag.area_mm2(),
    }
}

const DIRS: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn dir_index(dx: i64, dy: i64) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack is always an 8-neighbour")
}

/// 8-connected components of `mask`, largest first (ties: raster order).
pub fn connected_components(mask: &Bitmask) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut comps = Vec::new();
    for (x, y) in mask.iter_ones() {
        if seen[y * w + x] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([(x, y)]);
        seen[y * w + x] = true;
        while let Some((cx, cy)) = queue.pop_front() {
            comp.push((cx, cy));
            for (dx, dy) in DIRS {
                let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                if mask.get_signed(nx, ny) && !seen[ny as usize * w + nx as usize] {
                    seen[ny as usize * w + nx as usize] = true;
                    queue.push_back((nx as usize, ny as usize));
                }
            }
        }
        comps.push(comp);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()));
    comps
}

/// Moore-neighbour trace of the outer boundary of a component, in image
/// pixel coordinates, starting from its top-left pixel.
fn trace_boundary(mask: &Bitmask, start: (usize, usize)) -> Vec<(usize, usize)> {
    let fg = |x: i64, y: i64| mask.get_signed(x, y);
    let s = (start.0 as i64, start.1 as i64);
    let step = |p: (i64, i64), back: usize| -> Option<((i64, i64), usize)> {
        for k in 1..=8 {
            let d = (back + k) % 8;
            let q = (p.0 + DIRS[d].0, p.1 + DIRS[d].1);
            if fg(q.0, q.1) {
                let prev = (back + k + 7) % 8;
                let b = (p.0 + DIRS[prev].0, p.1 + DIRS[prev].1);
                return Some((q, dir_index(b.0 - q.0, b.1 - q.1)));
            }
        }
        None
    };
    // The start is the first pixel in raster order, so its west is empty.
    let Some(first) = step(s, 0) else {
        return vec![start];
    };
    let mut out = vec![start];
    let (mut p, mut back) = first;
    loop {
        let Some((q, nb)) = step(p, back) else { break };
        if p == s && q == first.0 {
            break;
        }
        out.push((p.0 as usize, p.1 as usize));
        p = q;
        back = nb;
    }
    out
}

/// Outer boundary of the largest 8-connected component as a closed,
/// counter-clockwise polyline through boundary pixel centers (local frame).
pub fn extract_contour(frag: &Fragment2D) -> Result<Polyline> {
    let comps = connected_components(frag.mask());
    let Some(largest) = comps.first() else {
        return Err(Error::InvalidInput(format!("fragment {}: empty mask", frag.id())));
    };
    if comps.len() > 1 {
        log::warn!(
            "fragment {}: {} connected components, tracing the largest ({} px)",
            frag.id(),
            comps.len(),
            largest.len()
        );
    }
    let start = *largest
        .iter()
        .min_by_key(|&&(x, y)| (y, x))
        .expect("component is non-empty");
    let pixels = trace_boundary(frag.mask(), start);
    if pixels.len() < 2 {
        return Err(Error::Degenerate(format!(
            "fragment {}: contour of a single pixel",
            frag.id()
        )));
    }
    let mut pts: Vec<Point2> = pixels
        .iter()
        .map(|&(c, r)| frag.pixel_center(c, r))
        .collect();
    if crate::geometry::polygon_signed_area(&pts) < 0.0 {
        pts.reverse();
    }
    Polyline::closed(pts)
}

/// Point-cloud fragment in millimetres.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment3D {
    pub id: String,
    pub points: Vec<Point3<f64>>,
    pub colors: Option<Vec<[u8; 3]>>,
}

impl Fragment3D {
    pub fn new(id: impl Into<String>, points: Vec<Point3<f64>>) -> Self {
        Fragment3D {
            id: id.into(),
            points,
            colors: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Requires at least four points spanning all three dimensions.
    pub fn check_volumetric(&self) -> Result<()> {
        if self.points.len() < 4 {
            return Err(Error::Degenerate(format!(
                "fragment {}: {} points, need >= 4 for a volume",
                self.id,
                self.points.len()
            )));
        }
        let n = self.points.len() as f64;
        let mean = self.points.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / n;
        let mut cov = Matrix3::zeros();
        for p in &self.points {
            let d = p.coords - mean;
            cov += d * d.transpose();
        }
        cov /= n;
        let eig = cov.symmetric_eigenvalues();
        let max = eig.max();
        if !(max > 0.0) || eig.min() <= 1e-12 * max {
            return Err(Error::Degenerate(format!(
                "fragment {}: point cloud is coplanar",
                self.id
            )));
        }
        Ok(())
    }

    /// Occupied voxel cells of the cloud under `pose`.
    pub fn voxelize(&self, pose: &Pose3D, voxel_mm: f64) -> HashSet<[i64; 3]> {
        self.points
            .iter()
            .map(|p| {
                let q = pose.apply(p);
                [
                    (q.x / voxel_mm).floor() as i64,
                    (q.y / voxel_mm).floor() as i64,
                    (q.z / voxel_mm).floor() as i64,
                ]
            })
            .collect()
    }

    /// Voxel-occupancy volume in mm³.
    pub fn volume(&self, voxel_mm: f64) -> Result<f64> {
        if !(voxel_mm > 0.0) {
            return Err(Error::InvalidInput("voxel size must be > 0".into()));
        }
        self.check_volumetric()?;
        let n = self.voxelize(&Pose3D::IDENTITY, voxel_mm).len();
        Ok(n as f64 * voxel_mm.powi(3))
    }
}

/// Fragment-id → pose map scored by the metrics.
///
/// `unplaced` lists fragments a solver could not position; their poses (if
/// present) carry no information.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<P> {
    pub poses: BTreeMap<String, P>,
    pub unplaced: BTreeSet<String>,
}

impl<P> Default for Solution<P> {
    fn default() -> Self {
        Solution {
            poses: BTreeMap::new(),
            unplaced: BTreeSet::new(),
        }
    }
}

impl<P> Solution<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_poses(poses: impl IntoIterator<Item = (String, P)>) -> Self {
        Solution {
            poses: poses.into_iter().collect(),
            unplaced: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, pose: P) {
        self.poses.insert(id.into(), pose);
    }

    pub fn get(&self, id: &str) -> Option<&P> {
        self.poses.get(id)
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn is_placed(&self, id: &str) -> bool {
        self.poses.contains_key(id) && !self.unplaced.contains(id)
    }
}

pub type Solution2D = Solution<Pose2D>;
pub type Solution3D = Solution<Pose3D>;

/// Canvas extent a puzzle was cut from (or that its assembly spans).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Puzzle2D {
    pub group_id: String,
    /// Sorted by id.
    pub fragments: Vec<Fragment2D>,
    pub ground_truth: Option<Solution2D>,
    pub canvas: Canvas,
    /// Largest gap expected between neighbouring fragments, when the source
    /// of the puzzle knows it (e.g. the erosion depth of a synthetic group).
    pub neighbor_tau: Option<f64>,
}

impl Puzzle2D {
    pub fn new(
        group_id: impl Into<String>,
        mut fragments: Vec<Fragment2D>,
        ground_truth: Option<Solution2D>,
        canvas: Option<Canvas>,
    ) -> Result<Self> {
        let group_id = group_id.into();
        if fragments.len() < 2 {
            return Err(Error::InvalidPuzzle(format!(
                "group {group_id}: {} fragment(s), need at least 2",
                fragments.len()
            )));
        }
        fragments.sort_by(|a, b| a.id().cmp(b.id()));
        for w in fragments.windows(2) {
            if w[0].id() == w[1].id() {
                return Err(Error::InvalidPuzzle(format!(
                    "group {group_id}: duplicate fragment id {}",
                    w[0].id()
                )));
            }
        }
        if let Some(gt) = &ground_truth {
            let ids: BTreeSet<&str> = fragments.iter().map(|f| f.id()).collect();
            let gt_ids: BTreeSet<&str> = gt.poses.keys().map(String::as_str).collect();
            if ids != gt_ids {
                let missing: Vec<_> = ids.difference(&gt_ids).collect();
                let extra: Vec<_> = gt_ids.difference(&ids).collect();
                return Err(Error::InvalidPuzzle(format!(
                    "group {group_id}: ground truth ids do not match fragments \
                     (missing {missing:?}, unknown {extra:?})"
                )));
            }
        }
        let canvas = canvas.unwrap_or_else(|| default_canvas(&fragments, ground_truth.as_ref()));
        Ok(Puzzle2D {
            group_id,
            fragments,
            ground_truth,
            canvas,
            neighbor_tau: None,
        })
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn fragment(&self, id: &str) -> Option<&Fragment2D> {
        self.fragments
            .binary_search_by(|f| f.id().cmp(id))
            .ok()
            .map(|i| &self.fragments[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.fragments.iter().map(|f| f.id())
    }

    pub fn total_area_px(&self) -> u64 {
        self.fragments.iter().map(|f| f.area_px()).sum()
    }
}

/// Ground-truth assembly extent when known, otherwise a square holding
/// twice the total fragment area.
fn default_canvas(fragments: &[Fragment2D], gt: Option<&Solution2D>) -> Canvas {
    if let Some(gt) = gt {
        let mut rect: Option<crate::geometry::raster::CellRect> = None;
        for f in fragments {
            if let Some(p) = gt.get(f.id()) {
                let r = place(f, p).rect();
                rect = Some(rect.map_or(r, |acc| acc.union(&r)));
            }
        }
        if let Some(r) = rect {
            return Canvas {
                width: r.width() as f64,
                height: r.height() as f64,
            };
        }
    }
    let total: u64 = fragments.iter().map(|f| f.area_px()).sum();
    let side = (2.0 * total as f64).sqrt().ceil();
    Canvas {
        width: side,
        height: side,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Puzzle3D {
    pub group_id: String,
    pub fragments: Vec<Fragment3D>,
    pub ground_truth: Option<Solution3D>,
}

impl Puzzle3D {
    pub fn new(
        group_id: impl Into<String>,
        mut fragments: Vec<Fragment3D>,
        ground_truth: Option<Solution3D>,
    ) -> Result<Self> {
        let group_id = group_id.into();
        if fragments.len() < 2 {
            return Err(Error::InvalidPuzzle(format!(
                "group {group_id}: {} fragment(s), need at least 2",
                fragments.len()
            )));
        }
        fragments.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(gt) = &ground_truth {
            let ids: BTreeSet<&str> = fragments.iter().map(|f| f.id()).collect();
            let gt_ids: BTreeSet<&str> = gt.poses.keys().map(String::as_str).collect();
            if ids != gt_ids {
                return Err(Error::InvalidPuzzle(format!(
                    "group {group_id}: ground truth ids do not match fragments"
                )));
            }
        }
        Ok(Puzzle3D {
            group_id,
            fragments,
            ground_truth,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "2d")]
    Two,
    #[serde(rename = "3d")]
    Three,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Puzzle {
    Flat(Puzzle2D),
    Solid(Puzzle3D),
}

impl Puzzle {
    pub fn group_id(&self) -> &str {
        match self {
            Puzzle::Flat(p) => &p.group_id,
            Puzzle::Solid(p) => &p.group_id,
        }
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            Puzzle::Flat(_) => Dimension::Two,
            Puzzle::Solid(_) => Dimension::Three,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn square_frag(side: usize) -> Fragment2D {
        Fragment2D::from_mask("sq", &Bitmask::from_fn(side, side, |_, _| true), [200, 10, 10]).unwrap()
    }

    fn disk_frag(radius: f64) -> Fragment2D {
        let n = (2.0 * radius).ceil() as usize + 4;
        let c = n as f64 / 2.0;
        let m = Bitmask::from_fn(n, n, |x, y| {
            let (dx, dy) = (x as f64 + 0.5 - c, y as f64 + 0.5 - c);
            dx * dx + dy * dy <= radius * radius
        });
        Fragment2D::from_mask("disk", &m, [1, 2, 3]).unwrap()
    }

    #[test]
    fn mask_follows_alpha() {
        let img = RgbaImage::from_fn(4, 3, |x, y| image::Rgba([9, 9, 9, ((x + y) % 2 * 7) as u8]));
        let f = Fragment2D::new("a", img.clone(), 1.0).unwrap();
        for (x, y, px) in img.enumerate_pixels() {
            assert_eq!(f.mask().get(x as usize, y as usize), px[3] > 0);
        }
        assert!(Fragment2D::new("e", RgbaImage::new(3, 3), 1.0).is_err());
    }

    #[test]
    fn areas_and_units() {
        let f = square_frag(10);
        assert_eq!(fragment_area(&f, AreaUnit::Pixels), 100.0);
        let f = f.with_px_per_mm(2.0).unwrap();
        assert_eq!(fragment_area(&f, AreaUnit::Millimetres), 25.0);
    }

    #[test]
    fn square_contour_has_36_points() {
        let c = extract_contour(&square_frag(10)).unwrap();
        assert_eq!(c.len(), 36);
        assert!(c.signed_area() > 0.0);
        // Polygon through boundary pixel centers encloses (10-1)^2.
        assert_abs_diff_eq!(c.signed_area(), 81.0, epsilon = 1e-9);
    }

    #[test]
    fn single_pixel_contour_rejected() {
        let f = Fragment2D::from_mask("p", &Bitmask::from_fn(3, 3, |x, y| x == 1 && y == 1), [0; 3]).unwrap();
        assert!(extract_contour(&f).is_err());
    }

    #[test]
    fn disk_contour_length() {
        let c = extract_contour(&disk_frag(20.0)).unwrap();
        let expected = 2.0 * std::f64::consts::PI * 20.0;
        assert!((c.length() - expected).abs() / expected < 0.05, "{}", c.length());
    }

    #[test]
    fn contour_takes_largest_component() {
        let m = Bitmask::from_fn(30, 10, |x, _| x < 4 || (10..25).contains(&x));
        let f = Fragment2D::from_mask("two", &m, [0; 3]).unwrap();
        let c = extract_contour(&f).unwrap();
        // Largest component spans local x in [10-15, 24-15] + 0.5.
        assert!(c.points().iter().all(|p| p.x > -5.5));
    }

    #[test]
    fn contour_points_lie_on_boundary_pixels() {
        let f = disk_frag(13.0);
        let c = extract_contour(&f).unwrap();
        for p in c.points() {
            let col = (p.x + f.width() as f64 / 2.0 - 0.5).round() as i64;
            let row = (f.height() as f64 / 2.0 - p.y - 0.5).round() as i64;
            assert!(f.mask().get_signed(col, row));
            let boundary = (-1..=1).any(|dy| {
                (-1..=1).any(|dx| !f.mask().get_signed(col + dx, row + dy))
            });
            assert!(boundary);
        }
    }

    #[test]
    fn identity_pose_centers_mask() {
        let f = square_frag(10);
        let p = place(&f, &Pose2D::new(0.0, 0.0, 0.0));
        assert_eq!((p.x0, p.y0), (-5, -5));
        assert_eq!(p.count(), 100);
    }

    #[test]
    fn half_turn_of_symmetric_mask_is_identical() {
        let f = disk_frag(9.0);
        let a = place(&f, &Pose2D::new(0.0, 0.0, 0.0));
        let b = place(&f, &Pose2D::new(0.0, 0.0, 180.0));
        assert_eq!(a, b);
    }

    #[test]
    fn rotation_preserves_area() {
        let f = square_frag(20);
        let p = place(&f, &Pose2D::new(3.3, -1.7, 45.0));
        assert!((p.count() as f64 - 400.0).abs() / 400.0 <= 0.02, "{}", p.count());
        for theta in (-180..=180).step_by(7) {
            let p = place(&f, &Pose2D::new(0.25, 0.5, theta as f64));
            assert!((p.count() as f64 - 400.0).abs() / 400.0 <= 0.02);
        }
    }

    #[test]
    fn full_turn_is_exact() {
        let f = disk_frag(7.5);
        let a = place(&f, &Pose2D::new(1.25, 2.0, 33.0));
        let b = place(&f, &Pose2D::new(1.25, 2.0, 33.0 + 360.0));
        assert_eq!(a, b);
    }

    #[test]
    fn pose3d_validation() {
        assert!(Pose3D::new(Matrix3::identity(), Vector3::zeros()).is_ok());
        assert!(Pose3D::new(Matrix3::identity() * 2.0, Vector3::zeros()).is_err());
        let reflect = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
        assert!(Pose3D::new(reflect, Vector3::zeros()).is_err());
    }

    #[test]
    fn cube_volume() {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    pts.push(Point3::new(i as f64 / 9.0, j as f64 / 9.0, k as f64 / 9.0));
                }
            }
        }
        let v = Fragment3D::new("cube", pts).volume(0.1).unwrap();
        assert!((v - 1.0).abs() <= 0.1, "{v}");
    }

    #[test]
    fn flat_cloud_has_no_volume() {
        let pts = (0..20)
            .map(|i| Point3::new(i as f64, (i * i) as f64, 0.0))
            .collect();
        assert!(Fragment3D::new("flat", pts).volume(1.0).is_err());
        assert!(Fragment3D::new("few", vec![Point3::origin(); 3]).volume(1.0).is_err());
    }

    #[test]
    fn puzzle_invariants() {
        let a = square_frag(4);
        assert!(Puzzle2D::new("g", vec![a.clone()], None, None).is_err());
        let mut b = square_frag(4);
        b = Fragment2D::new("b", b.rgba().clone(), 1.0).unwrap();
        let mut gt = Solution2D::new();
        gt.insert("sq", Pose2D::default());
        assert!(Puzzle2D::new("g", vec![a.clone(), b.clone()], Some(gt.clone()), None).is_err());
        gt.insert("b", Pose2D::new(4.0, 0.0, 0.0));
        let p = Puzzle2D::new("g", vec![a, b], Some(gt), None).unwrap();
        assert_eq!(p.ids().collect::<Vec<_>>(), vec!["b", "sq"]);
        assert_eq!(p.canvas.width, 8.0);
    }
}
