//! Synthetic puzzles: crossing-cuts fragmentation plus simulated erosion.
//!
//! The source image occupies the canvas rectangle `[0, W] x [0, H]` (Y up),
//! so image pixel `(c, r)` covers canvas cell `(c, H - 1 - r)`.

use std::collections::VecDeque;

use image::{Rgba, RgbaImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fragments::{Canvas, Fragment2D, Pose2D, Puzzle2D, Solution2D};
use crate::geometry::{sin_cos_deg, Bitmask, Point2};

pub const MIN_IMAGE_SIDE: u32 = 64;
const MAX_ATTEMPTS: u64 = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_cuts: usize,
    pub erosion_px: u32,
    pub erosion_jitter: f64,
    pub drop_fraction: f64,
    pub seed: u64,
    /// Store each fragment rotated by a random angle so that its ground-truth
    /// pose has a non-zero theta.
    pub rotate: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_cuts: 4,
            erosion_px: 0,
            erosion_jitter: 0.0,
            drop_fraction: 0.0,
            seed: 0,
            rotate: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cuts == 0 {
            return Err(Error::InvalidInput("n_cuts must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.erosion_jitter) {
            return Err(Error::InvalidInput(format!(
                "erosion_jitter must lie in [0, 1], got {}",
                self.erosion_jitter
            )));
        }
        if !(0.0..1.0).contains(&self.drop_fraction) {
            return Err(Error::InvalidInput(format!(
                "drop_fraction must lie in [0, 1), got {}",
                self.drop_fraction
            )));
        }
        Ok(())
    }
}

/// A straight cut through the canvas, given by two points on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub a: Point2,
    pub b: Point2,
}

impl Cut {
    pub fn new(a: Point2, b: Point2) -> Self {
        Cut { a, b }
    }

    /// True on the positive (left) side or on the line itself.
    pub fn side(&self, p: Point2) -> bool {
        (self.b - self.a).cross(p - self.a) >= 0.0
    }
}

/// Output of [`generate`].
#[derive(Debug, Clone)]
pub struct Generated {
    pub puzzle: Puzzle2D,
    pub cuts: Vec<Cut>,
    /// Fragments removed because erosion consumed them.
    pub vanished: Vec<String>,
    /// Fragments removed as missing pieces.
    pub dropped: Vec<String>,
    /// Seed that produced this puzzle (differs from the configured one after
    /// a retry).
    pub effective_seed: u64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn derived_seed(seed: u64, attempt: u64) -> u64 {
    seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn perimeter_point(w: f64, h: f64, s: f64) -> (Point2, u8) {
    if s < w {
        (Point2::new(s, 0.0), 0)
    } else if s < w + h {
        (Point2::new(w, s - w), 1)
    } else if s < 2.0 * w + h {
        (Point2::new(2.0 * w + h - s, h), 2)
    } else {
        (Point2::new(0.0, 2.0 * (w + h) - s), 3)
    }
}

/// Chords between two uniform points on the rectangle perimeter. Pairs on
/// the same side are redrawn since they would not cut anything.
pub fn sample_cuts(width: f64, height: f64, n: usize, rng: &mut impl Rng) -> Vec<Cut> {
    let perimeter = 2.0 * (width + height);
    let mut cuts = Vec::with_capacity(n);
    while cuts.len() < n {
        let (a, ea) = perimeter_point(width, height, rng.random::<f64>() * perimeter);
        let (b, eb) = perimeter_point(width, height, rng.random::<f64>() * perimeter);
        if ea != eb && a.distance(b) > 1e-9 {
            cuts.push(Cut::new(a, b));
        }
    }
    cuts
}

/// Full pipeline: cut, erode, drop. Retries with derived seeds until at
/// least two fragments survive.
pub fn generate(image: &RgbaImage, config: &GenConfig, group_id: &str) -> Result<Generated> {
    config.validate()?;
    check_image(image)?;
    let mut last_err = None;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = derived_seed(config.seed, attempt);
        let cfg = GenConfig {
            seed,
            ..config.clone()
        };
        match generate_once(image, &cfg, group_id) {
            Ok(g) => return Ok(g),
            Err(e @ (Error::Generation(_) | Error::InvalidPuzzle(_))) => {
                log::debug!("generation attempt {attempt} failed: {e}");
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation(format!(
        "no valid puzzle after {MAX_ATTEMPTS} attempts: {}",
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn generate_once(image: &RgbaImage, config: &GenConfig, group_id: &str) -> Result<Generated> {
    let (w, h) = image.dimensions();
    let cuts = sample_cuts(w as f64, h as f64, config.n_cuts, &mut rng_for(config.seed, 0));
    let puzzle = cut_with_lines(image, &cuts, group_id, config)?;
    let (puzzle, vanished) = erode_fragments(&puzzle, config)?;
    let (puzzle, dropped) = drop_fragments(&puzzle, config)?;
    Ok(Generated {
        puzzle,
        cuts,
        vanished,
        dropped,
        effective_seed: config.seed,
    })
}

fn check_image(image: &RgbaImage) -> Result<()> {
    let (w, h) = image.dimensions();
    if w < MIN_IMAGE_SIDE || h < MIN_IMAGE_SIDE {
        return Err(Error::InvalidInput(format!(
            "source image is {w}x{h}, need at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}"
        )));
    }
    Ok(())
}

/// Crossing-cuts fragmentation with random chords, no erosion or drops.
pub fn crossing_cuts(image: &RgbaImage, config: &GenConfig) -> Result<Puzzle2D> {
    config.validate()?;
    check_image(image)?;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = derived_seed(config.seed, attempt);
        let (w, h) = image.dimensions();
        let cuts = sample_cuts(w as f64, h as f64, config.n_cuts, &mut rng_for(seed, 0));
        let cfg = GenConfig {
            seed,
            ..config.clone()
        };
        match cut_with_lines(image, &cuts, "synthetic", &cfg) {
            Err(Error::InvalidPuzzle(_)) => continue,
            other => return other,
        }
    }
    Err(Error::Generation("every arrangement produced fewer than 2 faces".into()))
}

/// Partition `image` by explicit cut lines. Every image pixel becomes opaque
/// and lands in exactly one fragment.
pub fn crossing_cuts_with_lines(image: &RgbaImage, cuts: &[Cut], group_id: &str) -> Result<Puzzle2D> {
    check_image(image)?;
    cut_with_lines(image, cuts, group_id, &GenConfig::default())
}

/// Face label of every image pixel (row-major), numbered by first
/// appearance in raster order. Faces are split into 8-connected pieces.
pub fn face_labels(width: u32, height: u32, cuts: &[Cut]) -> Vec<u32> {
    let (w, h) = (width as usize, height as usize);
    let words = cuts.len().div_ceil(64).max(1);
    let mut keys: Vec<u64> = vec![0; w * h * words];
    for r in 0..h {
        for c in 0..w {
            let p = Point2::new(c as f64 + 0.5, h as f64 - r as f64 - 0.5);
            let key = &mut keys[(r * w + c) * words..][..words];
            for (k, cut) in cuts.iter().enumerate() {
                if cut.side(p) {
                    key[k / 64] |= 1 << (k % 64);
                }
            }
        }
    }
    let key = |i: usize| &keys[i * words..][..words];
    let mut labels = vec![u32::MAX; w * h];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if labels[start] != u32::MAX {
            continue;
        }
        labels[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (c, r) = ((i % w) as i64, (i / w) as i64);
            for dr in -1..=1i64 {
                for dc in -1..=1i64 {
                    let (nc, nr) = (c + dc, r + dr);
                    if nc < 0 || nr < 0 || nc >= w as i64 || nr >= h as i64 {
                        continue;
                    }
                    let j = nr as usize * w + nc as usize;
                    if labels[j] == u32::MAX && key(j) == key(start) {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
        next += 1;
    }
    labels
}

fn cut_with_lines(image: &RgbaImage, cuts: &[Cut], group_id: &str, config: &GenConfig) -> Result<Puzzle2D> {
    let (w, h) = image.dimensions();
    let (wu, hu) = (w as usize, h as usize);
    let labels = face_labels(w, h, cuts);
    let n_faces = labels.iter().max().map_or(0, |m| *m as usize + 1);
    if n_faces < 2 {
        return Err(Error::InvalidPuzzle(format!(
            "cut arrangement produced {n_faces} face(s)"
        )));
    }
    let mut bbox = vec![(usize::MAX, usize::MAX, 0usize, 0usize); n_faces];
    for (i, &l) in labels.iter().enumerate() {
        let (c, r) = (i % wu, i / wu);
        let b = &mut bbox[l as usize];
        b.0 = b.0.min(c);
        b.1 = b.1.min(r);
        b.2 = b.2.max(c);
        b.3 = b.3.max(r);
    }
    let digits = (n_faces - 1).to_string().len().max(3);
    let mut rot_rng = rng_for(config.seed, 3);
    let mut fragments = Vec::with_capacity(n_faces);
    let mut gt = Solution2D::new();
    for (label, &(c0, r0, c1, r1)) in bbox.iter().enumerate() {
        let (fw, fh) = (c1 - c0 + 1, r1 - r0 + 1);
        let rgba = RgbaImage::from_fn(fw as u32, fh as u32, |x, y| {
            let (c, r) = (c0 + x as usize, r0 + y as usize);
            if labels[r * wu + c] as usize == label {
                let p = image.get_pixel(c as u32, r as u32);
                Rgba([p[0], p[1], p[2], 255])
            } else {
                Rgba([0, 0, 0, 0])
            }
        });
        let id = format!("frag_{label:0digits$}");
        let x = c0 as f64 + fw as f64 / 2.0;
        let y = hu as f64 - r0 as f64 - fh as f64 / 2.0;
        let (rgba, theta) = if config.rotate {
            let theta = 180.0 - 360.0 * rot_rng.random::<f64>();
            let rotated = rotate_raster(&rgba, theta);
            // Slivers can vanish under nearest-neighbour resampling.
            if rotated.pixels().any(|p| p[3] > 0) {
                (rotated, theta)
            } else {
                (rgba, 0.0)
            }
        } else {
            (rgba, 0.0)
        };
        fragments.push(Fragment2D::new(id.clone(), rgba, 1.0)?);
        gt.insert(id, Pose2D::new(x, y, theta));
    }
    Puzzle2D::new(
        group_id,
        fragments,
        Some(gt),
        Some(Canvas {
            width: w as f64,
            height: h as f64,
        }),
    )
}

/// Resample `src` so that placing the result at angle `theta_deg` about the
/// same center reproduces `src` placed at angle zero (nearest neighbour).
fn rotate_raster(src: &RgbaImage, theta_deg: f64) -> RgbaImage {
    let (sw, sh) = (src.width() as f64, src.height() as f64);
    let (s, c) = sin_cos_deg(theta_deg);
    let ow = (sw * c.abs() + sh * s.abs()).ceil() as u32 + 2;
    let oh = (sw * s.abs() + sh * c.abs()).ceil() as u32 + 2;
    RgbaImage::from_fn(ow, oh, |x, y| {
        let qx = x as f64 + 0.5 - ow as f64 / 2.0;
        let qy = oh as f64 / 2.0 - y as f64 - 0.5;
        let px = c * qx - s * qy;
        let py = s * qx + c * qy;
        let col = (px + sw / 2.0).floor();
        let row = (sh / 2.0 - py).floor();
        if col < 0.0 || row < 0.0 || col >= sw || row >= sh {
            Rgba([0, 0, 0, 0])
        } else {
            *src.get_pixel(col as u32, row as u32)
        }
    })
}

/// Exact squared Euclidean distance from every pixel to the nearest pixel
/// where `background` is true (pixels outside the grid count as background).
pub fn squared_distance_to_background(w: usize, h: usize, background: impl Fn(usize, usize) -> bool) -> Vec<f64> {
    // Pad by one so the outside is represented explicitly.
    let (pw, ph) = (w + 2, h + 2);
    let inf = 1e20;
    let mut grid = vec![inf; pw * ph];
    for y in 0..ph {
        for x in 0..pw {
            let outside = x == 0 || y == 0 || x == pw - 1 || y == ph - 1;
            if outside || background(x - 1, y - 1) {
                grid[y * pw + x] = 0.0;
            }
        }
    }
    let mut f = vec![0.0; pw.max(ph)];
    let mut d = vec![0.0; pw.max(ph)];
    for x in 0..pw {
        for y in 0..ph {
            f[y] = grid[y * pw + x];
        }
        edt_1d(&f[..ph], &mut d[..ph]);
        for y in 0..ph {
            grid[y * pw + x] = d[y];
        }
    }
    for y in 0..ph {
        f[..pw].copy_from_slice(&grid[y * pw..(y + 1) * pw]);
        edt_1d(&f[..pw], &mut d[..pw]);
        grid[y * pw..(y + 1) * pw].copy_from_slice(&d[..pw]);
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        out.extend_from_slice(&grid[(y + 1) * pw + 1..(y + 1) * pw + 1 + w]);
    }
    out
}

/// Lower envelope of parabolas (Felzenszwalb & Huttenlocher).
fn edt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and the new parabola dominates everywhere.
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *out = diff * diff + f[p];
    }
}

/// Smoothed noise in `[0, 1]`: per-pixel uniforms averaged over a 3x3 box.
fn blurred_noise(w: usize, h: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..w * h).map(|_| rng.random::<f64>()).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (mut sum, mut n) = (0.0, 0u32);
            for yy in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for xx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    sum += raw[yy * w + xx];
                    n += 1;
                }
            }
            out[y * w + x] = sum / n as f64;
        }
    }
    out
}

/// Erode one mask: a pixel is removed when its distance to the background
/// is at most its local depth.
pub fn erode_mask(mask: &Bitmask, depth: impl Fn(usize, usize) -> f64) -> Bitmask {
    let (w, h) = (mask.width(), mask.height());
    let dist2 = squared_distance_to_background(w, h, |x, y| !mask.get(x, y));
    Bitmask::from_fn(w, h, |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        let d = depth(x, y);
        dist2[y * w + x] > d * d
    })
}

/// Simulated wear. Returns the eroded puzzle and the ids of fragments that
/// vanished entirely. Ground-truth poses are unchanged.
pub fn erode_fragments(puzzle: &Puzzle2D, config: &GenConfig) -> Result<(Puzzle2D, Vec<String>)> {
    config.validate()?;
    if config.erosion_px == 0 {
        return Ok((puzzle.clone(), Vec::new()));
    }
    let hi = config.erosion_px as f64;
    let jitter = config.erosion_jitter;
    let mut rng = rng_for(config.seed, 1);
    let mut kept = Vec::with_capacity(puzzle.len());
    let mut vanished = Vec::new();
    for frag in &puzzle.fragments {
        let (w, h) = (frag.width(), frag.height());
        let noise = blurred_noise(w, h, &mut rng);
        let eroded = erode_mask(frag.mask(), |x, y| hi - jitter * hi * noise[y * w + x]);
        if eroded.is_empty() {
            vanished.push(frag.id().to_owned());
        } else {
            kept.push(frag.with_mask(eroded)?);
        }
    }
    if kept.is_empty() {
        return Err(Error::Generation("erosion consumed every fragment".into()));
    }
    if !vanished.is_empty() {
        log::info!("erosion removed {} fragment(s): {:?}", vanished.len(), vanished);
    }
    let gt = puzzle.ground_truth.as_ref().map(|gt| restrict(gt, &kept));
    let mut eroded = Puzzle2D::new(puzzle.group_id.clone(), kept, gt, Some(puzzle.canvas))?;
    eroded.neighbor_tau = Some(suggested_tau(config.erosion_px).max(puzzle.neighbor_tau.unwrap_or(0.0)));
    Ok((eroded, vanished))
}

/// Neighbour threshold covering the widest gap erosion can open between
/// two fragments that touched before (both sides lose up to `erosion_px`).
pub fn suggested_tau(erosion_px: u32) -> f64 {
    (2.0 * erosion_px as f64 + 2.0).max(4.0)
}

fn restrict(gt: &Solution2D, kept: &[Fragment2D]) -> Solution2D {
    Solution2D::from_poses(
        kept.iter()
            .filter_map(|f| gt.get(f.id()).map(|p| (f.id().to_owned(), *p))),
    )
}

/// Remove `floor(drop_fraction * n)` randomly chosen fragments.
pub fn drop_fragments(puzzle: &Puzzle2D, config: &GenConfig) -> Result<(Puzzle2D, Vec<String>)> {
    let n = puzzle.len();
    let n_drop = (config.drop_fraction * n as f64).floor() as usize;
    if n_drop == 0 {
        return Ok((puzzle.clone(), Vec::new()));
    }
    if n - n_drop < 2 {
        return Err(Error::Generation(format!(
            "dropping {n_drop} of {n} fragments leaves fewer than 2"
        )));
    }
    let mut rng = rng_for(config.seed, 2);
    let chosen = rand::seq::index::sample(&mut rng, n, n_drop);
    let mut drop = vec![false; n];
    for i in chosen.iter() {
        drop[i] = true;
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (f, d) in puzzle.fragments.iter().zip(drop) {
        if d {
            dropped.push(f.id().to_owned());
        } else {
            kept.push(f.clone());
        }
    }
    let gt = puzzle.ground_truth.as_ref().map(|gt| restrict(gt, &kept));
    let mut out = Puzzle2D::new(puzzle.group_id.clone(), kept, gt, Some(puzzle.canvas))?;
    out.neighbor_tau = puzzle.neighbor_tau;
    Ok((out, dropped))
}

/// Uniform random poses inside the canvas, one per fragment in id order.
pub fn scramble(puzzle: &Puzzle2D, seed: u64) -> Solution2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    scramble_with(puzzle, &mut rng)
}

pub fn scramble_with(puzzle: &Puzzle2D, rng: &mut impl Rng) -> Solution2D {
    let Canvas { width, height } = puzzle.canvas;
    let mut sol = Solution2D::new();
    for f in &puzzle.fragments {
        let x = rng.random::<f64>() * width;
        let y = rng.random::<f64>() * height;
        let theta = 180.0 - 360.0 * rng.random::<f64>();
        sol.insert(f.id(), Pose2D::new(x, y, theta));
    }
    sol
}

/// Paint fragments at the given poses (nearest neighbour). Pixel `(u, v)`
/// of the output shows canvas cell `(origin.0 + u, origin.1 + height - 1 - v)`.
pub fn composite(
    fragments: &[Fragment2D],
    solution: &Solution2D,
    origin: (i64, i64),
    width: u32,
    height: u32,
) -> RgbaImage {
    let mut out = RgbaImage::new(width, height);
    for frag in fragments {
        let Some(pose) = solution.get(frag.id()) else {
            continue;
        };
        let inv = pose.to_transform().inverse();
        let placed = crate::fragments::place(frag, pose);
        let (fw, fh) = (frag.width() as f64, frag.height() as f64);
        for (i, j) in placed.mask.iter_ones() {
            let (ci, ck) = (placed.x0 + i as i64, placed.y0 + j as i64);
            let u = ci - origin.0;
            let v = origin.1 + height as i64 - 1 - ck;
            if u < 0 || v < 0 || u >= width as i64 || v >= height as i64 {
                continue;
            }
            let local = inv.apply(Point2::new(ci as f64 + 0.5, ck as f64 + 0.5));
            let col = ((local.x + fw / 2.0).floor() as u32).min(frag.width() as u32 - 1);
            let row = ((fh / 2.0 - local.y).floor() as u32).min(frag.height() as u32 - 1);
            out.put_pixel(u as u32, v as u32, *frag.rgba().get_pixel(col, row));
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragments::place;

    fn gradient(w: u32, h: u32) -> RgbaImage {
        RgbaImage::from_fn(w, h, |x, y| Rgba([(x % 256) as u8, (y % 256) as u8, ((x + y) % 256) as u8, 255]))
    }

    #[test]
    fn horizontal_bisection() {
        let img = gradient(64, 64);
        let cut = Cut::new(Point2::new(0.0, 32.0), Point2::new(64.0, 32.0));
        let p = crossing_cuts_with_lines(&img, &[cut], "g").unwrap();
        assert_eq!(p.len(), 2);
        for f in &p.fragments {
            assert_eq!(f.area_px(), 64 * 32);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let img = gradient(96, 80);
        let cfg = GenConfig {
            n_cuts: 5,
            seed: 17,
            erosion_px: 2,
            erosion_jitter: 0.5,
            ..Default::default()
        };
        let a = generate(&img, &cfg, "g").unwrap();
        let b = generate(&img, &cfg, "g").unwrap();
        assert_eq!(a.puzzle, b.puzzle);
    }

    #[test]
    fn tiling_reassembles_source() {
        let img = gradient(128, 100);
        let cfg = GenConfig {
            n_cuts: 8,
            seed: 3,
            ..Default::default()
        };
        let p = crossing_cuts(&img, &cfg).unwrap();
        assert_eq!(p.total_area_px(), 128 * 100);
        let gt = p.ground_truth.as_ref().unwrap();
        let placed: Vec<_> = p.fragments.iter().map(|f| place(f, gt.get(f.id()).unwrap())).collect();
        for i in 0..placed.len() {
            for j in i + 1..placed.len() {
                assert_eq!(placed[i].intersection_count(&placed[j]), 0);
            }
        }
        let out = composite(&p.fragments, gt, (0, 0), 128, 100);
        assert_eq!(out, img);
    }

    #[test]
    fn uniform_erosion_of_square() {
        let mask = Bitmask::from_fn(100, 100, |_, _| true);
        assert_eq!(erode_mask(&mask, |_, _| 3.0).count_ones(), 94 * 94);
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let mask = Bitmask::from_fn(23, 17, |x, y| (x * 7 + y * 3) % 11 != 0 && x > 1);
        let d = squared_distance_to_background(23, 17, |x, y| !mask.get(x, y));
        for y in 0..17i64 {
            for x in 0..23i64 {
                let mut best = i64::MAX;
                for yy in -1..=17i64 {
                    for xx in -1..=23i64 {
                        let bg = xx < 0 || yy < 0 || xx >= 23 || yy >= 17 || !mask.get(xx as usize, yy as usize);
                        if bg {
                            best = best.min((xx - x).pow(2) + (yy - y).pow(2));
                        }
                    }
                }
                assert_eq!(d[(y * 23 + x) as usize], best as f64, "at ({x}, {y})");
            }
        }
    }

    #[test]
    fn erosion_identity_and_subset() {
        let img = gradient(80, 80);
        let base = crossing_cuts(&img, &GenConfig { n_cuts: 3, seed: 5, ..Default::default() }).unwrap();
        let (same, _) = erode_fragments(&base, &GenConfig::default()).unwrap();
        assert_eq!(same, base);
        let cfg = GenConfig { n_cuts: 3, seed: 5, erosion_px: 3, erosion_jitter: 0.7, ..Default::default() };
        let (eroded, vanished) = erode_fragments(&base, &cfg).unwrap();
        assert_eq!(eroded.len() + vanished.len(), base.len());
        for f in &eroded.fragments {
            let orig = base.fragment(f.id()).unwrap();
            assert!(f.mask().iter_ones().all(|(x, y)| orig.mask().get(x, y)));
            assert!(f.area_px() < orig.area_px());
        }
    }

    #[test]
    fn drop_uses_floor() {
        let img = gradient(128, 128);
        let cuts: Vec<Cut> = (1..10)
            .map(|i| Cut::new(Point2::new(i as f64 * 12.8, 0.0), Point2::new(i as f64 * 12.8, 128.0)))
            .collect();
        let p = crossing_cuts_with_lines(&img, &cuts, "g").unwrap();
        assert_eq!(p.len(), 10);
        let (kept, dropped) = drop_fragments(&p, &GenConfig { drop_fraction: 0.25, ..Default::default() }).unwrap();
        assert_eq!((kept.len(), dropped.len()), (8, 2));
    }

    #[test]
    fn rotated_ground_truth_reassembles() {
        let img = gradient(96, 96);
        let cfg = GenConfig { n_cuts: 3, seed: 9, rotate: true, ..Default::default() };
        let p = crossing_cuts(&img, &cfg).unwrap();
        let gt = p.ground_truth.as_ref().unwrap();
        assert!(gt.poses.values().any(|q| q.theta_deg.abs() > 1.0));
        let total: u64 = p
            .fragments
            .iter()
            .map(|f| place(f, gt.get(f.id()).unwrap()).count())
            .sum();
        let diff = (total as f64 - 96.0 * 96.0).abs() / (96.0 * 96.0);
        assert!(diff < 0.03, "placed area off by {diff}");
    }

    #[test]
    fn scramble_is_seeded() {
        let img = gradient(64, 64);
        let p = crossing_cuts(&img, &GenConfig { n_cuts: 2, seed: 1, ..Default::default() }).unwrap();
        assert_eq!(scramble(&p, 4), scramble(&p, 4));
        assert_ne!(scramble(&p, 4), scramble(&p, 5));
        assert_eq!(scramble(&p, 4).len(), p.len());
    }

    #[test]
    fn small_image_rejected() {
        assert!(crossing_cuts(&gradient(32, 80), &GenConfig::default()).is_err());
    }
}
