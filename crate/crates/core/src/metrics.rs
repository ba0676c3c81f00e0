//! Reassembly scores: anchor alignment, positional overlap, pose RMSE and
//! mating-graph precision/recall.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dataset_io::AnySolution;
use crate::error::{Error, Result};
use crate::fragments::{
    place_scaled, Dimension, Fragment2D, Fragment3D, Pose2D, Pose3D, Puzzle, Puzzle2D, Puzzle3D,
    Solution, Solution2D, Solution3D,
};
use crate::geometry::{normalize_deg, PlacedMask};
use crate::par;

pub const DEFAULT_TAU_2D: f64 = 4.0;
pub const DEFAULT_TAU_3D: f64 = 2.0;

pub const CSV_HEADER: &str = "group,method,q_pos,rmse_rot_deg,rmse_trans,precision,recall,f1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Neighbour distance threshold (px in 2D, mm in 3D). `None` uses the
    /// puzzle's own hint, then the dimension default.
    pub neighbor_tau: Option<f64>,
    /// Canvas cell size in fragment pixels for 2D rasters.
    pub raster_cell: f64,
    pub voxel_mm: f64,
    pub rmse_after_anchor: bool,
    /// `sqrt(mean(d^2))` instead of `sum(d) / sqrt(n)`.
    pub classic_rmse: bool,
    /// 3D rotation error as Frobenius distance instead of geodesic degrees.
    pub chordal_rotation: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            neighbor_tau: None,
            raster_cell: 1.0,
            voxel_mm: 1.0,
            rmse_after_anchor: true,
            classic_rmse: false,
            chordal_rotation: false,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.neighbor_tau {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidInput(format!("neighbor_tau must be > 0, got {t}")));
            }
        }
        if !(self.raster_cell > 0.0) || !self.raster_cell.is_finite() {
            return Err(Error::InvalidInput("raster_cell must be > 0".into()));
        }
        if !(self.voxel_mm > 0.0) || !self.voxel_mm.is_finite() {
            return Err(Error::InvalidInput("voxel_mm must be > 0".into()));
        }
        Ok(())
    }
}

/// Undirected adjacency between fragments.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatingGraph {
    nodes: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

impl MatingGraph {
    pub fn new(nodes: impl IntoIterator<Item = impl Into<String>>) -> Self {
        MatingGraph {
            nodes: nodes.into_iter().map(Into::into).collect(),
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::InvalidInput(format!("self-loop on {a}")));
        }
        for id in [a, b] {
            if !self.nodes.contains(id) {
                return Err(Error::InvalidInput(format!("unknown node {id}")));
            }
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.insert((a.to_owned(), b.to_owned()));
        Ok(())
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.contains(&(a.to_owned(), b.to_owned()))
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter_map(move |(a, b)| {
            if a == id {
                Some(b.as_str())
            } else if b == id {
                Some(a.as_str())
            } else {
                None
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub group: String,
    pub dimension: Dimension,
    pub q_pos: f64,
    pub rmse_translation: f64,
    pub rmse_rotation: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub anchor: String,
    pub n_fragments: usize,
    pub unplaced: usize,
    pub neighbor_tau: f64,
}

/// Largest fragment, ties broken by the smallest id.
pub fn select_anchor<'a>(sizes: impl IntoIterator<Item = (&'a str, f64)>) -> Option<&'a str> {
    let mut best: Option<(&str, f64)> = None;
    for (id, size) in sizes {
        best = match best {
            Some((bid, bs)) if bs > size || (bs == size && bid <= id) => Some((bid, bs)),
            _ => Some((id, size)),
        };
    }
    best.map(|(id, _)| id)
}

/// Move the whole 2D solution rigidly so the anchor sits on its ground-truth
/// pose.
pub fn align_to_anchor_2d(solution: &Solution2D, gt: &Solution2D, anchor: &str) -> Result<Solution2D> {
    let (Some(s), Some(g)) = (solution.get(anchor), gt.get(anchor)) else {
        return Err(Error::InvalidInput(format!("anchor {anchor} has no pose")));
    };
    if s == g {
        return Ok(solution.clone());
    }
    let t = g.to_transform().compose(&s.to_transform().inverse());
    let mut out = Solution2D::new();
    for (id, p) in &solution.poses {
        out.insert(id.clone(), Pose2D::from_transform(&t.compose(&p.to_transform())));
    }
    out.insert(anchor, *g);
    out.unplaced = solution.unplaced.clone();
    Ok(out)
}

pub fn align_to_anchor_3d(solution: &Solution3D, gt: &Solution3D, anchor: &str) -> Result<Solution3D> {
    let (Some(s), Some(g)) = (solution.get(anchor), gt.get(anchor)) else {
        return Err(Error::InvalidInput(format!("anchor {anchor} has no pose")));
    };
    if s == g {
        return Ok(solution.clone());
    }
    let t = g.compose(&s.inverse());
    let mut out = Solution3D::new();
    for (id, p) in &solution.poses {
        out.insert(id.clone(), t.compose(p));
    }
    out.insert(anchor, *g);
    out.unplaced = solution.unplaced.clone();
    Ok(out)
}

/// Anchor alignment on the largest fragment of the puzzle.
pub fn anchor_align(solution: &Solution2D, puzzle: &Puzzle2D) -> Result<Solution2D> {
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    let anchor = select_anchor(puzzle.fragments.iter().map(|f| (f.id(), f.area_px() as f64)))
        .ok_or_else(|| Error::InvalidInput("empty puzzle".into()))?;
    align_to_anchor_2d(solution, gt, anchor)
}

fn require_gt<P>(gt: Option<&Solution<P>>) -> Result<&Solution<P>> {
    gt.ok_or_else(|| Error::InvalidInput("puzzle has no ground truth; metrics need one".into()))
}

fn is_placed<P>(sol: &Solution<P>, id: &str) -> bool {
    sol.get(id).is_some() && !sol.unplaced.contains(id)
}

/// Area-weighted share of each fragment's footprint that lands on its
/// ground-truth footprint. `solution` should already be aligned.
pub fn q_pos_2d(solution: &Solution2D, puzzle: &Puzzle2D, config: &MetricsConfig) -> Result<f64> {
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    let cell = config.raster_cell;
    let terms = par::map_slice(&puzzle.fragments, |f| -> Result<(u64, f64)> {
        let area = f.area_px();
        let (Some(s), Some(g)) = (solution.get(f.id()), gt.get(f.id())) else {
            return Ok((area, 0.0));
        };
        if solution.unplaced.contains(f.id()) {
            return Ok((area, 0.0));
        }
        let at_sol = place_scaled(f, s, cell);
        if at_sol.count() == 0 {
            return Err(Error::Degenerate(format!(
                "fragment {} covers no canvas cell at cell size {cell}",
                f.id()
            )));
        }
        let at_gt = place_scaled(f, g, cell);
        Ok((area, at_gt.intersection_count(&at_sol) as f64 / at_sol.count() as f64))
    });
    let mut total = 0u64;
    let mut acc = 0.0;
    for t in terms {
        let (area, term) = t?;
        total += area;
        acc += area as f64 * term;
    }
    Ok((acc / total as f64).clamp(0.0, 1.0))
}

fn aggregate(dists: &[f64], classic: bool) -> Result<f64> {
    if dists.is_empty() {
        return Err(Error::InvalidInput("no fragments to score".into()));
    }
    let n = dists.len() as f64;
    Ok(if classic {
        (dists.iter().map(|d| d * d).sum::<f64>() / n).sqrt()
    } else {
        dists.iter().sum::<f64>() / n.sqrt()
    })
}

fn fragment_diagonal_mm(f: &Fragment2D) -> f64 {
    (f.width() as f64).hypot(f.height() as f64) / f.px_per_mm()
}

/// Translation error in millimetres per fragment (unplaced: the fragment's
/// diagonal).
pub fn translation_errors_2d(solution: &Solution2D, puzzle: &Puzzle2D) -> Result<Vec<f64>> {
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    Ok(puzzle
        .fragments
        .iter()
        .map(|f| match (solution.get(f.id()), gt.get(f.id())) {
            (Some(s), Some(g)) if !solution.unplaced.contains(f.id()) => {
                (s.x - g.x).hypot(s.y - g.y) / f.px_per_mm()
            }
            _ => fragment_diagonal_mm(f),
        })
        .collect())
}

/// Wrapped angular error in degrees per fragment (unplaced: 180).
pub fn rotation_errors_2d(solution: &Solution2D, puzzle: &Puzzle2D) -> Result<Vec<f64>> {
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    Ok(puzzle
        .fragments
        .iter()
        .map(|f| match (solution.get(f.id()), gt.get(f.id())) {
            (Some(s), Some(g)) if !solution.unplaced.contains(f.id()) => {
                normalize_deg(s.theta_deg - g.theta_deg).abs()
            }
            _ => 180.0,
        })
        .collect())
}

pub fn rmse_translation_2d(solution: &Solution2D, puzzle: &Puzzle2D, config: &MetricsConfig) -> Result<f64> {
    let sol = maybe_align_2d(solution, puzzle, config)?;
    aggregate(&translation_errors_2d(&sol, puzzle)?, config.classic_rmse)
}

pub fn rmse_rotation_2d(solution: &Solution2D, puzzle: &Puzzle2D, config: &MetricsConfig) -> Result<f64> {
    let sol = maybe_align_2d(solution, puzzle, config)?;
    aggregate(&rotation_errors_2d(&sol, puzzle)?, config.classic_rmse)
}

fn anchor_2d<'a>(solution: &Solution2D, puzzle: &'a Puzzle2D) -> Result<&'a str> {
    select_anchor(
        puzzle
            .fragments
            .iter()
            .filter(|f| is_placed(solution, f.id()))
            .map(|f| (f.id(), f.area_px() as f64)),
    )
    .ok_or_else(|| Error::InvalidInput("solution places no fragment".into()))
}

fn maybe_align_2d(solution: &Solution2D, puzzle: &Puzzle2D, config: &MetricsConfig) -> Result<Solution2D> {
    if !config.rmse_after_anchor {
        return Ok(solution.clone());
    }
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    align_to_anchor_2d(solution, gt, anchor_2d(solution, puzzle)?)
}

/// Dilation radius (cells) used to decide adjacency for threshold `tau`.
pub fn dilation_radius(tau: f64, cell: f64) -> u32 {
    (tau / (2.0 * cell)).ceil() as u32 + 1
}

/// Fragments are neighbours when their masks, each dilated by
/// `ceil(tau / 2) + 1` pixels, overlap. Unplaced fragments stay isolated.
pub fn build_mating_graph_2d(
    fragments: &[Fragment2D],
    solution: &Solution2D,
    tau: f64,
    cell: f64,
) -> MatingGraph {
    let mut graph = MatingGraph::new(fragments.iter().map(|f| f.id()));
    let placed: Vec<&Fragment2D> = fragments
        .iter()
        .filter(|f| is_placed(solution, f.id()))
        .collect();
    let radius = dilation_radius(tau, cell);
    let dilated: Vec<PlacedMask> = par::map_slice(&placed, |f| {
        place_scaled(f, solution.get(f.id()).expect("filtered"), cell).dilate(radius)
    });
    let pairs: Vec<(usize, usize)> = (0..placed.len())
        .flat_map(|i| (i + 1..placed.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| dilated[i].rect().intersect(&dilated[j].rect()).is_some())
        .collect();
    let hits = par::map_slice(&pairs, |&(i, j)| dilated[i].intersects(&dilated[j]));
    for (&(i, j), hit) in pairs.iter().zip(hits) {
        if hit {
            graph
                .add_edge(placed[i].id(), placed[j].id())
                .expect("ids come from the fragment list");
        }
    }
    graph
}

/// Area-weighted edge agreement: the shared-edge mass is divided by the
/// ground-truth mass for precision and by the solution mass for recall. Empty denominators give 0.
pub fn precision_recall_f1(
    m_sol: &MatingGraph,
    m_gt: &MatingGraph,
    areas: &BTreeMap<String, f64>,
) -> (f64, f64, f64) {
    let mass = |(a, b): &(String, String)| {
        areas.get(a).copied().unwrap_or(0.0) + areas.get(b).copied().unwrap_or(0.0)
    };
    let shared: f64 = m_sol.edges.intersection(&m_gt.edges).map(mass).sum();
    let gt_mass: f64 = m_gt.edges.iter().map(mass).sum();
    let sol_mass: f64 = m_sol.edges.iter().map(mass).sum();
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let p = ratio(shared, gt_mass);
    let r = ratio(shared, sol_mass);
    let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    (p, r, f1)
}

fn tau_for(config: &MetricsConfig, hint: Option<f64>, dim: Dimension) -> f64 {
    config.neighbor_tau.or(hint).unwrap_or(match dim {
        Dimension::Two => DEFAULT_TAU_2D,
        Dimension::Three => DEFAULT_TAU_3D,
    })
}

pub fn evaluate_2d(solution: &Solution2D, puzzle: &Puzzle2D, config: &MetricsConfig) -> Result<MetricsReport> {
    config.validate()?;
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    if solution.is_empty() {
        return Err(Error::InvalidInput("empty solution".into()));
    }
    for id in solution.poses.keys() {
        if puzzle.fragment(id).is_none() {
            return Err(Error::InvalidInput(format!("solution names unknown fragment {id}")));
        }
    }
    let anchor = anchor_2d(solution, puzzle)?;
    let aligned = align_to_anchor_2d(solution, gt, anchor)?;
    let q_pos = q_pos_2d(&aligned, puzzle, config)?;
    let rmse_sol = if config.rmse_after_anchor {
        &aligned
    } else {
        solution
    };
    let rmse_translation = aggregate(&translation_errors_2d(rmse_sol, puzzle)?, config.classic_rmse)?;
    let rmse_rotation = aggregate(&rotation_errors_2d(rmse_sol, puzzle)?, config.classic_rmse)?;

    let tau = tau_for(config, puzzle.neighbor_tau, Dimension::Two);
    let m_gt = build_mating_graph_2d(&puzzle.fragments, gt, tau, config.raster_cell);
    let m_sol = build_mating_graph_2d(&puzzle.fragments, &aligned, tau, config.raster_cell);
    let areas: BTreeMap<String, f64> = puzzle
        .fragments
        .iter()
        .map(|f| (f.id().to_owned(), f.area_px() as f64))
        .collect();
    let (precision, recall, f1) = precision_recall_f1(&m_sol, &m_gt, &areas);
    let unplaced = puzzle
        .fragments
        .iter()
        .filter(|f| !is_placed(solution, f.id()))
        .count();
    Ok(MetricsReport {
        group: puzzle.group_id.clone(),
        dimension: Dimension::Two,
        q_pos,
        rmse_translation,
        rmse_rotation,
        precision,
        recall,
        f1,
        anchor: anchor.to_owned(),
        n_fragments: puzzle.len(),
        unplaced,
        neighbor_tau: tau,
    })
}

/// Geodesic angle between two rotations, in degrees.
pub fn geodesic_deg(a: &Pose3D, b: &Pose3D) -> f64 {
    let m = a.rotation.transpose() * b.rotation;
    ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Frobenius norm of the rotation difference.
pub fn chordal_distance(a: &Pose3D, b: &Pose3D) -> f64 {
    (a.rotation - b.rotation).norm()
}

fn cloud_diagonal(f: &Fragment3D) -> f64 {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in &f.points {
        lo = lo.inf(&p.coords);
        hi = hi.sup(&p.coords);
    }
    if f.points.is_empty() {
        0.0
    } else {
        (hi - lo).norm()
    }
}

fn voxel_volume(f: &Fragment3D, voxel_mm: f64) -> f64 {
    f.voxelize(&Pose3D::IDENTITY, voxel_mm).len() as f64
}

pub fn q_pos_3d(solution: &Solution3D, puzzle: &Puzzle3D, config: &MetricsConfig) -> Result<f64> {
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    let terms = par::map_slice(&puzzle.fragments, |f| -> Result<(f64, f64)> {
        let vol = voxel_volume(f, config.voxel_mm);
        if vol == 0.0 {
            return Err(Error::Degenerate(format!("fragment {} has no volume", f.id())));
        }
        let (Some(s), Some(g)) = (solution.get(f.id()), gt.get(f.id())) else {
            return Ok((vol, 0.0));
        };
        if solution.unplaced.contains(f.id()) {
            return Ok((vol, 0.0));
        }
        let at_sol = f.voxelize(s, config.voxel_mm);
        let at_gt = f.voxelize(g, config.voxel_mm);
        let inter = at_sol.intersection(&at_gt).count();
        Ok((vol, inter as f64 / at_sol.len() as f64))
    });
    let (mut total, mut acc) = (0.0, 0.0);
    for t in terms {
        let (vol, term) = t?;
        total += vol;
        acc += vol * term;
    }
    Ok((acc / total).clamp(0.0, 1.0))
}

fn grid_key(p: &Point3<f64>, cell: f64) -> [i64; 3] {
    [
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    ]
}

fn clouds_within(a: &[Point3<f64>], b: &[Point3<f64>], grid_b: &HashMap<[i64; 3], Vec<u32>>, tau: f64) -> bool {
    let t2 = tau * tau;
    a.iter().any(|p| {
        let k = grid_key(p, tau);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(idx) = grid_b.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        if idx.iter().any(|&i| (b[i as usize] - p).norm_squared() < t2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    })
}

/// Neighbours are fragments whose transformed point clouds come closer
/// than `tau` millimetres.
pub fn build_mating_graph_3d(fragments: &[Fragment3D], solution: &Solution3D, tau: f64) -> MatingGraph {
    let mut graph = MatingGraph::new(fragments.iter().map(|f| f.id()));
    let placed: Vec<&Fragment3D> = fragments
        .iter()
        .filter(|f| is_placed(solution, f.id()))
        .collect();
    let clouds: Vec<Vec<Point3<f64>>> = par::map_slice(&placed, |f| {
        let pose = solution.get(f.id()).expect("filtered");
        f.points.iter().map(|p| pose.apply(p)).collect()
    });
    let grids: Vec<HashMap<[i64; 3], Vec<u32>>> = par::map_slice(&clouds, |c| {
        let mut g: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        for (i, p) in c.iter().enumerate() {
            g.entry(grid_key(p, tau)).or_default().push(i as u32);
        }
        g
    });
    let pairs: Vec<(usize, usize)> = (0..placed.len())
        .flat_map(|i| (i + 1..placed.len()).map(move |j| (i, j)))
        .collect();
    let hits = par::map_slice(&pairs, |&(i, j)| {
        let (small, large) = if clouds[i].len() <= clouds[j].len() { (i, j) } else { (j, i) };
        clouds_within(&clouds[small], &clouds[large], &grids[large], tau)
    });
    for (&(i, j), hit) in pairs.iter().zip(hits) {
        if hit {
            graph
                .add_edge(placed[i].id(), placed[j].id())
                .expect("ids come from the fragment list");
        }
    }
    graph
}

pub fn evaluate_3d(solution: &Solution3D, puzzle: &Puzzle3D, config: &MetricsConfig) -> Result<MetricsReport> {
    config.validate()?;
    let gt = require_gt(puzzle.ground_truth.as_ref())?;
    if solution.is_empty() {
        return Err(Error::InvalidInput("empty solution".into()));
    }
    for (id, p) in &solution.poses {
        if !puzzle.fragments.iter().any(|f| f.id() == id) {
            return Err(Error::InvalidInput(format!("solution names unknown fragment {id}")));
        }
        p.validate()?;
    }
    let volumes: Vec<(&str, f64)> = puzzle
        .fragments
        .iter()
        .map(|f| (f.id(), voxel_volume(f, config.voxel_mm)))
        .collect();
    let anchor = select_anchor(volumes.iter().copied().filter(|(id, _)| is_placed(solution, id)))
        .ok_or_else(|| Error::InvalidInput("solution places no fragment".into()))?;
    let aligned = align_to_anchor_3d(solution, gt, anchor)?;
    let q_pos = q_pos_3d(&aligned, puzzle, config)?;
    let rmse_sol = if config.rmse_after_anchor {
        &aligned
    } else {
        solution
    };
    let mut t_err = Vec::new();
    let mut r_err = Vec::new();
    for f in &puzzle.fragments {
        match (rmse_sol.get(f.id()), gt.get(f.id())) {
            (Some(s), Some(g)) if !rmse_sol.unplaced.contains(f.id()) => {
                t_err.push((s.translation - g.translation).norm());
                r_err.push(if config.chordal_rotation {
                    chordal_distance(s, g)
                } else {
                    geodesic_deg(s, g)
                });
            }
            _ => {
                t_err.push(cloud_diagonal(f));
                r_err.push(if config.chordal_rotation { 2.0 * 2f64.sqrt() } else { 180.0 });
            }
        }
    }
    let tau = tau_for(config, None, Dimension::Three);
    let m_gt = build_mating_graph_3d(&puzzle.fragments, gt, tau);
    let m_sol = build_mating_graph_3d(&puzzle.fragments, &aligned, tau);
    let areas: BTreeMap<String, f64> = volumes.iter().map(|(id, v)| (id.to_string(), *v)).collect();
    let (precision, recall, f1) = precision_recall_f1(&m_sol, &m_gt, &areas);
    Ok(MetricsReport {
        group: puzzle.group_id.clone(),
        dimension: Dimension::Three,
        q_pos,
        rmse_translation: aggregate(&t_err, config.classic_rmse)?,
        rmse_rotation: aggregate(&r_err, config.classic_rmse)?,
        precision,
        recall,
        f1,
        anchor: anchor.to_owned(),
        n_fragments: puzzle.fragments.len(),
        unplaced: puzzle
            .fragments
            .iter()
            .filter(|f| !is_placed(solution, f.id()))
            .count(),
        neighbor_tau: tau,
    })
}

/// Dispatch on the puzzle dimension.
pub fn evaluate(solution: &AnySolution, puzzle: &Puzzle, config: &MetricsConfig) -> Result<MetricsReport> {
    match (solution, puzzle) {
        (AnySolution::Flat(s), Puzzle::Flat(p)) => evaluate_2d(s, p, config),
        (AnySolution::Solid(s), Puzzle::Solid(p)) => evaluate_3d(s, p, config),
        // An empty file parses as 2D; let it through as an empty 3D solution.
        (AnySolution::Flat(s), Puzzle::Solid(p)) if s.is_empty() => evaluate_3d(&Solution3D::new(), p, config),
        (_, p) => Err(Error::InvalidInput(format!(
            "solution dimension does not match {} group {}",
            match p.dimension() {
                Dimension::Two => "2D",
                Dimension::Three => "3D",
            },
            p.group_id()
        ))),
    }
}

/// Field-wise arithmetic mean of several reports.
pub fn mean_report(reports: &[MetricsReport], group: &str) -> Option<MetricsReport> {
    let first = reports.first()?;
    let n = reports.len() as f64;
    let mean = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Some(MetricsReport {
        group: group.to_owned(),
        dimension: first.dimension,
        q_pos: mean(|r| r.q_pos),
        rmse_translation: mean(|r| r.rmse_translation),
        rmse_rotation: mean(|r| r.rmse_rotation),
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
        anchor: String::new(),
        n_fragments: reports.iter().map(|r| r.n_fragments).sum(),
        unplaced: reports.iter().map(|r| r.unplaced).sum(),
        neighbor_tau: first.neighbor_tau,
    })
}

/// One CSV row in [`CSV_HEADER`] order; a missing report leaves the metric
/// fields empty.
pub fn csv_row(group: &str, method: &str, report: Option<&MetricsReport>) -> String {
    match report {
        Some(r) => format!(
            "{group},{method},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.q_pos, r.rmse_rotation, r.rmse_translation, r.precision, r.recall, r.f1
        ),
        None => format!("{group},{method},,,,,,"),
    }
}
