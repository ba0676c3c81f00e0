//! Bit-packed binary rasters and their rigid placement on an unbounded
//! integer canvas.
//!
//! A fragment raster uses image conventions (row 0 on top). Its local frame
//! puts the origin at the raster center with Y up, so pixel `(c, r)` of a
//! `W x H` raster has its center at `(c + 0.5 - W/2, H/2 - r - 0.5)`.
//! Canvas cells are indexed Y-up: cell `(i, k)` covers
//! `[i, i+1) x [k, k+1)` times the cell size.

use super::{sin_cos_deg, Point2, RigidTransform2};
use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Bitmask {
    width: usize,
    height: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Bitmask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bitmask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("ones", &self.count_ones())
            .finish()
    }
}

impl Bitmask {
    pub fn new(width: usize, height: usize) -> Self {
        let words_per_row = width.div_ceil(WORD);
        Bitmask {
            width,
            height,
            words_per_row,
            bits: vec![0; words_per_row * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Bitmask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let w = self.bits[y * self.words_per_row + x / WORD];
        (w >> (x % WORD)) & 1 == 1
    }

    /// Like [`Bitmask::get`] but false outside the raster.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.get(x as usize, y as usize)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        debug_assert!(x < self.width && y < self.height);
        let w = &mut self.bits[y * self.words_per_row + x / WORD];
        if value {
            *w |= 1 << (x % WORD);
        } else {
            *w &= !(1 << (x % WORD));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn row(&self, y: usize) -> &[u64] {
        &self.bits[y * self.words_per_row..(y + 1) * self.words_per_row]
    }

    fn row_mut(&mut self, y: usize) -> &mut [u64] {
        &mut self.bits[y * self.words_per_row..(y + 1) * self.words_per_row]
    }

    /// 64 bits of row `y` starting at column `start`; zero outside the raster.
    #[inline]
    fn window(&self, y: usize, start: i64) -> u64 {
        if start >= self.width as i64 || start <= -(WORD as i64) {
            return 0;
        }
        let row = self.row(y);
        let word = start.div_euclid(WORD as i64);
        let shift = start.rem_euclid(WORD as i64) as u32;
        let at = |i: i64| -> u64 {
            if i < 0 || i as usize >= row.len() {
                0
            } else {
                row[i as usize]
            }
        };
        if shift == 0 {
            at(word)
        } else {
            (at(word) >> shift) | (at(word + 1) << (WORD as u32 - shift))
        }
    }

    /// `(min_x, min_y, max_x, max_y)` of the set bits, inclusive.
    pub fn bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut out: Option<(usize, usize, usize, usize)> = None;
        for y in 0..self.height {
            let row = self.row(y);
            let first = row.iter().position(|&w| w != 0);
            let Some(first) = first else { continue };
            let last = row.iter().rposition(|&w| w != 0).unwrap_or(first);
            let lo = first * WORD + row[first].trailing_zeros() as usize;
            let hi = last * WORD + (WORD - 1 - row[last].leading_zeros() as usize);
            out = Some(match out {
                None => (lo, y, hi, y),
                Some((a, b, c, _)) => (a.min(lo), b, c.max(hi), y),
            });
        }
        out
    }

    /// Copy of the sub-rectangle `[x0, x0+w) x [y0, y0+h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Bitmask {
        let mut out = Bitmask::new(w, h);
        for y in 0..h {
            for wi in 0..out.words_per_row {
                let v = self.window(y0 + y, (x0 + wi * WORD) as i64);
                out.row_mut(y)[wi] = v;
            }
            out.clear_tail(y);
        }
        out
    }

    fn clear_tail(&mut self, y: usize) {
        let rem = self.width % WORD;
        if rem != 0 {
            let last = self.words_per_row - 1;
            self.row_mut(y)[last] &= (1u64 << rem) - 1;
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| {
            self.row(y).iter().enumerate().flat_map(move |(wi, &w)| {
                let mut bits = w;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        return None;
                    }
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some((wi * WORD + b, y))
                })
            })
        })
    }
}

/// A binary raster resampled onto the canvas grid.
///
/// Cell `(x0 + i, y0 + j)` is occupied iff `mask.get(i, j)`; row `j`
/// increases upward.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedMask {
    pub x0: i64,
    pub y0: i64,
    pub cell: f64,
    pub mask: Bitmask,
}

/// Canvas rectangle in cell units, `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl CellRect {
    pub fn width(&self) -> i64 {
        (self.x1 - self.x0).max(0)
    }

    pub fn height(&self) -> i64 {
        (self.y1 - self.y0).max(0)
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn union(&self, other: &CellRect) -> CellRect {
        CellRect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn intersect(&self, other: &CellRect) -> Option<CellRect> {
        let r = CellRect {
            x0: self.x0.max(other.x0),
            y0: self.y0.max(other.y0),
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
        };
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }
}

impl PlacedMask {
    pub fn empty(cell: f64) -> Self {
        PlacedMask {
            x0: 0,
            y0: 0,
            cell,
            mask: Bitmask::new(0, 0),
        }
    }

    /// Resample `raster` (image rows) under `pose`, nearest neighbour, on a
    /// canvas with square cells of side `cell` raster pixels.
    pub fn place(raster: &Bitmask, pose: &RigidTransform2, cell: f64) -> PlacedMask {
        assert!(cell > 0.0, "cell size must be positive");
        let (w, h) = (raster.width() as f64, raster.height() as f64);
        if raster.width() == 0 || raster.height() == 0 {
            return PlacedMask::empty(cell);
        }
        let corners = [
            Point2::new(-w / 2.0, -h / 2.0),
            Point2::new(w / 2.0, -h / 2.0),
            Point2::new(w / 2.0, h / 2.0),
            Point2::new(-w / 2.0, h / 2.0),
        ]
        .map(|p| pose.apply(p));
        let min_x = corners.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let max_x = corners.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let min_y = corners.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_y = corners.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let i0 = (min_x / cell).floor() as i64 - 1;
        let i1 = (max_x / cell).ceil() as i64 + 1;
        let k0 = (min_y / cell).floor() as i64 - 1;
        let k1 = (max_y / cell).ceil() as i64 + 1;
        let out_w = (i1 - i0) as usize;
        let out_h = (k1 - k0) as usize;

        let (s, c) = sin_cos_deg(pose.theta_deg);
        let (tx, ty) = (pose.tx, pose.ty);
        let (half_w, half_h) = (w / 2.0, h / 2.0);
        let (wi, hi_rows) = (raster.width() as i64, raster.height() as i64);
        let mut out = Bitmask::new(out_w, out_h);
        let mut seen = false;
        let (mut bx0, mut by0, mut bx1, mut by1) = (usize::MAX, usize::MAX, 0usize, 0usize);

        for j in 0..out_h {
            let cy = ((k0 + j as i64) as f64 + 0.5) * cell - ty;
            // local x = c*dx + s*cy, local y = -s*dx + c*cy with dx affine in i.
            let (mut lo, mut hi) = (0i64, out_w as i64 - 1);
            let base_dx = (i0 as f64 + 0.5) * cell - tx;
            narrow(&mut lo, &mut hi, c * base_dx + s * cy, c * cell, -half_w, half_w);
            narrow(&mut lo, &mut hi, -s * base_dx + c * cy, -s * cell, -half_h, half_h);
            if lo > hi {
                continue;
            }
            let (lx0, ly0) = (c * base_dx + s * cy + half_w, half_h + s * base_dx - c * cy);
            let (dcol, drow) = (c * cell, s * cell);
            let (mut first, mut last) = (None, 0usize);
            for i in lo.max(0)..=hi.min(out_w as i64 - 1) {
                let fi = i as f64;
                let col = floor_i64(lx0 + dcol * fi);
                let row = floor_i64(ly0 + drow * fi);
                if col < 0 || row < 0 || col >= wi || row >= hi_rows {
                    continue;
                }
                if raster.get(col as usize, row as usize) {
                    let iu = i as usize;
                    out.set(iu, j, true);
                    first.get_or_insert(iu);
                    last = iu;
                }
            }
            if let Some(first) = first {
                seen = true;
                bx0 = bx0.min(first);
                bx1 = bx1.max(last);
                by0 = by0.min(j);
                by1 = by1.max(j);
            }
        }
        if !seen {
            return PlacedMask::empty(cell);
        }
        PlacedMask {
            x0: i0 + bx0 as i64,
            y0: k0 + by0 as i64,
            cell,
            mask: out.crop(bx0, by0, bx1 - bx0 + 1, by1 - by0 + 1),
        }
    }

    pub fn count(&self) -> u64 {
        self.mask.count_ones()
    }

    /// Occupied area in raster pixel units.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.cell * self.cell
    }

    pub fn is_empty(&self) -> bool {
        self.mask.width() == 0 || self.mask.height() == 0 || self.mask.is_empty()
    }

    pub fn rect(&self) -> CellRect {
        CellRect {
            x0: self.x0,
            y0: self.y0,
            x1: self.x0 + self.mask.width() as i64,
            y1: self.y0 + self.mask.height() as i64,
        }
    }

    #[inline]
    pub fn contains(&self, i: i64, k: i64) -> bool {
        self.mask.get_signed(i - self.x0, k - self.y0)
    }

    fn check_cells(&self, other: &PlacedMask) {
        assert!(
            self.cell == other.cell,
            "placed masks live on canvases with different cell sizes"
        );
    }

    /// Number of cells occupied by both masks.
    pub fn intersection_count(&self, other: &PlacedMask) -> u64 {
        self.fold_overlap(other, 0u64, |acc, a, b| (acc + (a & b).count_ones() as u64, false))
    }

    pub fn intersects(&self, other: &PlacedMask) -> bool {
        self.fold_overlap(other, false, |_, a, b| {
            let hit = a & b != 0;
            (hit, hit)
        })
    }

    /// Walks 64-cell windows of both masks over their common rectangle.
    /// The closure returns the new accumulator and whether to stop.
    fn fold_overlap<T>(&self, other: &PlacedMask, init: T, mut f: impl FnMut(T, u64, u64) -> (T, bool)) -> T {
        self.check_cells(other);
        if self.is_empty() || other.is_empty() {
            return init;
        }
        let Some(common) = self.rect().intersect(&other.rect()) else {
            return init;
        };
        let mut acc = init;
        for k in common.y0..common.y1 {
            let ya = (k - self.y0) as usize;
            let yb = (k - other.y0) as usize;
            let mut x = common.x0;
            while x < common.x1 {
                let wa = self.mask.window(ya, x - self.x0);
                let wb = other.mask.window(yb, x - other.x0);
                let remaining = common.x1 - x;
                let keep = if remaining >= WORD as i64 {
                    u64::MAX
                } else {
                    (1u64 << remaining) - 1
                };
                let (next, stop) = f(acc, wa & keep, wb & keep);
                acc = next;
                if stop {
                    return acc;
                }
                x += WORD as i64;
            }
        }
        acc
    }

    /// Cell-wise union covering both inputs.
    pub fn union(&self, other: &PlacedMask) -> PlacedMask {
        self.check_cells(other);
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let r = self.rect().union(&other.rect());
        let mut out = Bitmask::new(r.width() as usize, r.height() as usize);
        for src in [self, other] {
            for j in 0..src.mask.height() {
                let y = (src.y0 - r.y0) as usize + j;
                let off = src.x0 - r.x0;
                for wi in 0..out.words_per_row {
                    let v = src.mask.window(j, (wi * WORD) as i64 - off);
                    out.row_mut(y)[wi] |= v;
                }
            }
        }
        PlacedMask {
            x0: r.x0,
            y0: r.y0,
            cell: self.cell,
            mask: out,
        }
    }

    /// Morphological dilation by a disk of integer `radius` cells
    /// (offsets with `dx^2 + dy^2 <= radius^2`).
    pub fn dilate(&self, radius: u32) -> PlacedMask {
        if self.is_empty() || radius == 0 {
            return self.clone();
        }
        let r = radius as i64;
        let (w, h) = (self.mask.width(), self.mask.height());
        let out_w = w + 2 * radius as usize;
        let out_h = h + 2 * radius as usize;
        let mut out = Bitmask::new(out_w, out_h);
        for t in 0..out_h as i64 {
            for dy in -r..=r {
                let src = t - r - dy;
                if src < 0 || src >= h as i64 {
                    continue;
                }
                let half = ((r * r - dy * dy) as f64).sqrt().floor() as i64;
                for wi in 0..out.words_per_row {
                    let x = (wi * WORD) as i64;
                    let mut acc = 0u64;
                    for dx in -half..=half {
                        acc |= self.mask.window(src as usize, x - r - dx);
                    }
                    out.row_mut(t as usize)[wi] |= acc;
                }
            }
            out.clear_tail(t as usize);
        }
        PlacedMask {
            x0: self.x0 - r,
            y0: self.y0 - r,
            cell: self.cell,
            mask: out,
        }
    }

    /// Convex hull of the occupied cells (as unit squares) in canvas cell
    /// coordinates, counter-clockwise.
    pub fn hull_points(&self) -> Vec<Point2> {
        let mut pts = Vec::new();
        for j in 0..self.mask.height() {
            let row = self.mask.row(j);
            let Some(first) = row.iter().position(|&w| w != 0) else {
                continue;
            };
            let last = row.iter().rposition(|&w| w != 0).unwrap_or(first);
            let lo = (first * WORD + row[first].trailing_zeros() as usize) as i64 + self.x0;
            let hi = (last * WORD + WORD - row[last].leading_zeros() as usize) as i64 + self.x0;
            let (y0, y1) = ((j as i64 + self.y0) as f64, (j as i64 + self.y0 + 1) as f64);
            let (lo, hi) = (lo as f64, hi as f64);
            pts.extend([
                Point2::new(lo, y0),
                Point2::new(lo, y1),
                Point2::new(hi, y0),
                Point2::new(hi, y1),
            ]);
        }
        convex_hull(pts)
    }

    /// Area of the convex hull of the occupied cells, in cell units.
    pub fn hull_area(&self) -> f64 {
        super::polygon_signed_area(&self.hull_points()).abs()
    }
}

/// Smallest-area enclosing rectangle of a convex polygon (one side is
/// always flush with a hull edge).
pub fn min_area_rect(hull: &[Point2]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..hull.len() {
        let e = hull[(i + 1) % hull.len()] - hull[i];
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        let u = e * (1.0 / len);
        let v = Point2::new(-u.y, u.x);
        let (mut u0, mut u1, mut v0, mut v1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in hull {
            let (a, b) = (p.dot(u), p.dot(v));
            u0 = u0.min(a);
            u1 = u1.max(a);
            v0 = v0.min(b);
            v1 = v1.max(b);
        }
        best = best.min((u1 - u0) * (v1 - v0));
    }
    best
}

/// Shrinks `[lo, hi]` to indices `i` where `lo_bound <= a + b*i <= hi_bound`
/// could hold, with one cell of slack on each side.
/// `f64::floor` for values well inside the i64 range, without a libm call.
#[inline]
fn floor_i64(v: f64) -> i64 {
    let t = v as i64;
    if (t as f64) > v {
        t - 1
    } else {
        t
    }
}

fn narrow(lo: &mut i64, hi: &mut i64, a: f64, b: f64, lo_bound: f64, hi_bound: f64) {
    if b.abs() < 1e-12 {
        if a < lo_bound - 1e-9 || a > hi_bound + 1e-9 {
            *lo = 1;
            *hi = 0;
        }
        return;
    }
    let (t0, t1) = ((lo_bound - a) / b, (hi_bound - a) / b);
    let (t0, t1) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
    *lo = (*lo).max(t0.floor() as i64 - 1);
    *hi = (*hi).min(t1.ceil() as i64 + 1);
}

/// Andrew's monotone chain; counter-clockwise, no repeated endpoint.
pub fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Result of [`raster_intersection_area`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionArea {
    /// Shared area in raster pixel units.
    pub area: f64,
    /// Set when a fixed canvas was given and one of the placements fell
    /// entirely outside it.
    pub off_canvas: bool,
}

/// Pixel-counted area shared by two rasters placed on a common canvas.
///
/// `cell` is the canvas cell size in raster pixels (1 = native resolution).
/// With `canvas == None` the canvas grows to fit both placements.
pub fn raster_intersection_area(
    mask_a: &Bitmask,
    pose_a: &RigidTransform2,
    mask_b: &Bitmask,
    pose_b: &RigidTransform2,
    cell: f64,
    canvas: Option<CellRect>,
) -> Result<IntersectionArea> {
    if !(cell > 0.0) || !cell.is_finite() {
        return Err(Error::InvalidInput(format!("resolution must be > 0, got {cell}")));
    }
    if mask_a.is_empty() || mask_b.is_empty() {
        return Err(Error::InvalidInput("intersection of an empty mask".into()));
    }
    let a = PlacedMask::place(mask_a, pose_a, cell);
    let b = PlacedMask::place(mask_b, pose_b, cell);
    if let Some(rect) = canvas {
        let outside = |m: &PlacedMask| m.is_empty() || rect.intersect(&m.rect()).is_none();
        if outside(&a) || outside(&b) {
            log::warn!("placement lies entirely outside the fixed canvas");
            return Ok(IntersectionArea {
                area: 0.0,
                off_canvas: true,
            });
        }
        let clip = |m: &PlacedMask| -> PlacedMask {
            let r = rect.intersect(&m.rect()).expect("checked above");
            let mut out = Bitmask::new(r.width() as usize, r.height() as usize);
            for (x, y) in m.mask.iter_ones() {
                let (i, k) = (m.x0 + x as i64, m.y0 + y as i64);
                if i >= r.x0 && i < r.x1 && k >= r.y0 && k < r.y1 {
                    out.set((i - r.x0) as usize, (k - r.y0) as usize, true);
                }
            }
            PlacedMask {
                x0: r.x0,
                y0: r.y0,
                cell,
                mask: out,
            }
        };
        let n = clip(&a).intersection_count(&clip(&b));
        return Ok(IntersectionArea {
            area: n as f64 * cell * cell,
            off_canvas: false,
        });
    }
    Ok(IntersectionArea {
        area: a.intersection_count(&b) as f64 * cell * cell,
        off_canvas: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solid(w: usize, h: usize) -> Bitmask {
        Bitmask::from_fn(w, h, |_, _| true)
    }

    #[test]
    fn window_reads_across_words() {
        let m = Bitmask::from_fn(130, 1, |x, _| x % 3 == 0);
        for start in [-70i64, -5, 0, 1, 63, 64, 65, 100, 129] {
            let w = m.window(0, start);
            for b in 0..64 {
                let x = start + b;
                let expect = x >= 0 && x < 130 && x % 3 == 0;
                assert_eq!((w >> b) & 1 == 1, expect, "start {start} bit {b}");
            }
        }
    }

    #[test]
    fn identity_placement_is_exact() {
        let m = Bitmask::from_fn(7, 5, |x, y| (x + y) % 2 == 0);
        let p = PlacedMask::place(&m, &RigidTransform2::new(0.0, 3.5, 2.5), 1.0);
        assert_eq!(p.count(), m.count_ones());
        // Raster pixel (c, r) lands on canvas cell (c, 4 - r).
        for (c, r) in m.iter_ones() {
            assert!(p.contains(c as i64, 4 - r as i64));
        }
    }

    #[test]
    fn identical_masks_share_full_area() {
        let m = solid(12, 9);
        let pose = RigidTransform2::new(0.0, 6.0, 4.5);
        let r = raster_intersection_area(&m, &pose, &m, &pose, 1.0, None).unwrap();
        assert_eq!(r.area, 108.0);
    }

    #[test]
    fn disjoint_masks_share_nothing() {
        let m = solid(10, 10);
        let a = RigidTransform2::new(0.0, 0.0, 0.0);
        let b = RigidTransform2::new(0.0, 50.0, 0.0);
        let r = raster_intersection_area(&m, &a, &m, &b, 1.0, None).unwrap();
        assert_eq!(r.area, 0.0);
    }

    #[test]
    fn offset_squares_share_a_quarter() {
        let m = solid(100, 100);
        let a = RigidTransform2::new(0.0, 0.0, 0.0);
        let b = RigidTransform2::new(0.0, 50.0, 50.0);
        let r = raster_intersection_area(&m, &a, &m, &b, 1.0, None).unwrap();
        assert_eq!(r.area, 2500.0);
    }

    #[test]
    fn fixed_canvas_flags_off_canvas() {
        let m = solid(4, 4);
        let a = RigidTransform2::new(0.0, 0.0, 0.0);
        let b = RigidTransform2::new(0.0, 1000.0, 0.0);
        let canvas = CellRect { x0: -10, y0: -10, x1: 10, y1: 10 };
        let r = raster_intersection_area(&m, &a, &m, &b, 1.0, Some(canvas)).unwrap();
        assert!(r.off_canvas);
        assert_eq!(r.area, 0.0);
        let r = raster_intersection_area(&m, &a, &m, &a, 1.0, Some(canvas)).unwrap();
        assert_eq!(r.area, 16.0);
    }

    #[test]
    fn coarser_cells_scale_area() {
        let m = solid(40, 40);
        let a = RigidTransform2::new(0.0, 0.0, 0.0);
        let r = raster_intersection_area(&m, &a, &m, &a, 2.0, None).unwrap();
        assert_eq!(r.area, 1600.0);
    }

    #[test]
    fn half_turn_of_symmetric_mask() {
        let m = Bitmask::from_fn(9, 9, |x, y| {
            let (dx, dy) = (x as i64 - 4, y as i64 - 4);
            dx * dx + 2 * dy * dy <= 20
        });
        let a = PlacedMask::place(&m, &RigidTransform2::new(0.0, 10.5, 3.5), 1.0);
        let b = PlacedMask::place(&m, &RigidTransform2::new(180.0, 10.5, 3.5), 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn dilation_matches_brute_force() {
        let m = Bitmask::from_fn(70, 9, |x, y| (x * 7 + y * 3) % 11 == 0);
        let p = PlacedMask::place(&m, &RigidTransform2::new(0.0, 35.0, 4.5), 1.0);
        let d = p.dilate(3);
        for k in -10..25i64 {
            for i in -10..90i64 {
                let mut expect = false;
                for dy in -3i64..=3 {
                    for dx in -3i64..=3 {
                        if dx * dx + dy * dy <= 9 && p.contains(i - dx, k - dy) {
                            expect = true;
                        }
                    }
                }
                assert_eq!(d.contains(i, k), expect, "cell ({i},{k})");
            }
        }
    }

    #[test]
    fn hull_of_rectangle() {
        let p = PlacedMask::place(&solid(10, 4), &RigidTransform2::IDENTITY, 1.0);
        assert_eq!(p.hull_area(), 40.0);
    }

    proptest! {
        #[test]
        fn intersection_symmetric_and_bounded(
            seed in 0u64..1000,
            ax in -20.0..20.0f64, ay in -20.0..20.0f64, at in -180.0..180.0f64,
            bx in -20.0..20.0f64, by in -20.0..20.0f64, bt in -180.0..180.0f64,
        ) {
            let ma = Bitmask::from_fn(23, 17, |x, y| (x as u64 * 31 + y as u64 * 17 + seed) % 5 != 0);
            let mb = Bitmask::from_fn(19, 29, |x, y| (x as u64 * 13 + y as u64 * 7 + seed) % 3 != 0);
            let pa = RigidTransform2::new(at, ax, ay);
            let pb = RigidTransform2::new(bt, bx, by);
            let ab = raster_intersection_area(&ma, &pa, &mb, &pb, 1.0, None).unwrap().area;
            let ba = raster_intersection_area(&mb, &pb, &ma, &pa, 1.0, None).unwrap().area;
            prop_assert_eq!(ab, ba);
            let a_area = PlacedMask::place(&ma, &pa, 1.0).area();
            let b_area = PlacedMask::place(&mb, &pb, 1.0).area();
            prop_assert!(ab <= a_area.min(b_area));

            // Brute-force count over the common rectangle.
            let a = PlacedMask::place(&ma, &pa, 1.0);
            let b = PlacedMask::place(&mb, &pb, 1.0);
            let mut brute = 0u64;
            if let Some(r) = a.rect().intersect(&b.rect()) {
                for k in r.y0..r.y1 {
                    for i in r.x0..r.x1 {
                        if a.contains(i, k) && b.contains(i, k) {
                            brute += 1;
                        }
                    }
                }
            }
            prop_assert_eq!(brute, a.intersection_count(&b));
            prop_assert_eq!(brute > 0, a.intersects(&b));
        }
    }

    #[test]
    fn min_rect_of_rotated_square() {
        let (s, c) = crate::geometry::sin_cos_deg(30.0);
        let pts: Vec<Point2> = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]
            .iter()
            .map(|&(x, y)| Point2::new(c * x - s * y, s * x + c * y))
            .collect();
        assert!((min_area_rect(&convex_hull(pts)) - 4.0).abs() < 1e-9);
    }
}
