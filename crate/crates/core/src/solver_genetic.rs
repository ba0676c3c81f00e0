//! Genetic placement: a population of full-puzzle pose matrices evolved
//! under a bounding-rectangle plus overlap fitness.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fragments::{place_scaled, Pose2D, Puzzle2D, Solution2D};
use crate::geometry::{circular_mean_deg, normalize_deg, CellRect, PlacedMask};
use crate::par;
use crate::puzzle_gen::scramble_with;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneticConfig {
    pub population: usize,
    pub generations: usize,
    pub sigma_t: f64,
    pub sigma_theta: f64,
    pub lambda_bbox: f64,
    pub lambda_overlap: f64,
    pub seed: u64,
    /// Average parent angles arithmetically instead of on the circle.
    pub literal_mean: bool,
    /// Canvas cell size in fragment pixels used when rasterising.
    pub raster_cell: f64,
}

impl Default for GeneticConfig {
    fn default() -> Self {
        GeneticConfig {
            population: 64,
            generations: 500,
            sigma_t: 5.0,
            sigma_theta: 5.0,
            lambda_bbox: 1.0,
            lambda_overlap: 4.0,
            seed: 0,
            literal_mean: false,
            raster_cell: 1.0,
        }
    }
}

impl GeneticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 8 || self.population % 4 != 0 {
            return Err(Error::InvalidInput(format!(
                "population must be a multiple of 4 and >= 8, got {}",
                self.population
            )));
        }
        for (name, v) in [
            ("sigma_t", self.sigma_t),
            ("sigma_theta", self.sigma_theta),
            ("lambda_bbox", self.lambda_bbox),
            ("lambda_overlap", self.lambda_overlap),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.lambda_bbox + self.lambda_overlap <= 0.0 {
            return Err(Error::InvalidInput("lambda_bbox + lambda_overlap must be > 0".into()));
        }
        if !(self.raster_cell > 0.0) {
            return Err(Error::InvalidInput("raster_cell must be > 0".into()));
        }
        Ok(())
    }
}

/// One candidate assembly: a row `(x, y, theta_deg)` per fragment, in the
/// puzzle's id order.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub rows: Vec<[f64; 3]>,
}

impl Chromosome {
    pub fn from_solution(sol: &Solution2D, puzzle: &Puzzle2D) -> Result<Self> {
        puzzle
            .fragments
            .iter()
            .map(|f| {
                sol.get(f.id())
                    .map(|p| [p.x, p.y, p.theta_deg])
                    .ok_or_else(|| Error::InvalidInput(format!("no pose for {}", f.id())))
            })
            .collect::<Result<Vec<_>>>()
            .map(|rows| Chromosome { rows })
    }

    pub fn to_solution(&self, puzzle: &Puzzle2D) -> Solution2D {
        Solution2D::from_poses(
            puzzle
                .fragments
                .iter()
                .zip(&self.rows)
                .map(|(f, r)| (f.id().to_owned(), Pose2D::new(r[0], r[1], r[2]))),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// The two raw fitness terms, in square fragment pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessTerms {
    pub bbox_area: f64,
    pub overlap_area: f64,
}

impl FitnessTerms {
    pub fn weighted(&self, config: &GeneticConfig) -> f64 {
        config.lambda_bbox * self.bbox_area + config.lambda_overlap * self.overlap_area
    }
}

pub fn fitness_terms(chrom: &Chromosome, puzzle: &Puzzle2D, cell: f64) -> FitnessTerms {
    assert_eq!(chrom.len(), puzzle.len(), "chromosome does not match the puzzle");
    let placed: Vec<PlacedMask> = puzzle
        .fragments
        .iter()
        .zip(&chrom.rows)
        .map(|(f, r)| place_scaled(f, &Pose2D::new(r[0], r[1], r[2]), cell))
        .collect();
    let mut rect: Option<CellRect> = None;
    for p in placed.iter().filter(|p| !p.is_empty()) {
        let r = p.rect();
        rect = Some(rect.map_or(r, |acc| acc.union(&r)));
    }
    let mut overlap = 0u64;
    for i in 0..placed.len() {
        for j in i + 1..placed.len() {
            overlap += placed[i].intersection_count(&placed[j]);
        }
    }
    let cell2 = cell * cell;
    FitnessTerms {
        bbox_area: rect.map_or(0, |r| r.area()) as f64 * cell2,
        overlap_area: overlap as f64 * cell2,
    }
}

/// Lower is better.
pub fn fitness(chrom: &Chromosome, puzzle: &Puzzle2D, config: &GeneticConfig) -> f64 {
    fitness_terms(chrom, puzzle, config.raster_cell).weighted(config)
}

/// Fitness of every chromosome, in order.
pub fn population_fitness(pop: &[Chromosome], puzzle: &Puzzle2D, config: &GeneticConfig) -> Vec<f64> {
    par::map_slice(pop, |c| fitness(c, puzzle, config))
}

/// Stable ascending sort by fitness.
fn rank(pop: Vec<Chromosome>, scores: Vec<f64>) -> Vec<(Chromosome, f64)> {
    let mut scored: Vec<(Chromosome, f64)> = pop.into_iter().zip(scores).collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));
    scored
}

fn offspring(a: &Chromosome, b: &Chromosome, config: &GeneticConfig, rng: &mut impl Rng) -> Chromosome {
    let normal_t = Normal::new(0.0, config.sigma_t).expect("sigma validated");
    let normal_r = Normal::new(0.0, config.sigma_theta).expect("sigma validated");
    let rows = a
        .rows
        .iter()
        .zip(&b.rows)
        .map(|(ra, rb)| {
            let theta = if config.literal_mean {
                0.5 * (ra[2] + rb[2])
            } else {
                circular_mean_deg(ra[2], rb[2])
            };
            let mut child = [0.5 * (ra[0] + rb[0]), 0.5 * (ra[1] + rb[1]), theta];
            if config.sigma_t > 0.0 {
                child[0] += normal_t.sample(rng);
                child[1] += normal_t.sample(rng);
            }
            if config.sigma_theta > 0.0 {
                child[2] += normal_r.sample(rng);
            }
            child[2] = normalize_deg(child[2]);
            child
        })
        .collect();
    Chromosome { rows }
}

/// Replace the `M/4` least fit members of a ranked population with children
/// of two distinct parents drawn from the fittest `M/2`.
fn breed(ranked: &[(Chromosome, f64)], config: &GeneticConfig, rng: &mut impl Rng) -> Vec<Chromosome> {
    let m = ranked.len();
    let n_children = m / 4;
    let pool = m / 2;
    let mut next: Vec<Chromosome> = ranked[..m - n_children].iter().map(|(c, _)| c.clone()).collect();
    for _ in 0..n_children {
        let pick = rand::seq::index::sample(rng, pool, 2);
        let (i, j) = (pick.index(0), pick.index(1));
        next.push(offspring(&ranked[i].0, &ranked[j].0, config, rng));
    }
    next
}

/// One generation step. The returned population lists the survivors in
/// fitness order followed by the new children.
pub fn evolve_generation(
    population: Vec<Chromosome>,
    puzzle: &Puzzle2D,
    config: &GeneticConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Chromosome>> {
    config.validate()?;
    if population.len() != config.population {
        return Err(Error::InvalidInput(format!(
            "population has {} members, config expects {}",
            population.len(),
            config.population
        )));
    }
    let scores = population_fitness(&population, puzzle, config);
    Ok(breed(&rank(population, scores), config, rng))
}

#[derive(Debug, Clone)]
pub struct GeneticResult {
    pub solution: Solution2D,
    pub best: Chromosome,
    pub best_fitness: f64,
    /// Best fitness of the initial population followed by the best after
    /// each generation.
    pub trace: Vec<f64>,
}

pub fn initial_population(puzzle: &Puzzle2D, config: &GeneticConfig, rng: &mut impl Rng) -> Vec<Chromosome> {
    (0..config.population)
        .map(|_| {
            let sol = scramble_with(puzzle, rng);
            Chromosome::from_solution(&sol, puzzle).expect("scramble covers every fragment")
        })
        .collect()
}

pub fn solve_genetic(puzzle: &Puzzle2D, config: &GeneticConfig) -> Result<GeneticResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pop = initial_population(puzzle, config, &mut rng);
    let scores = population_fitness(&pop, puzzle, config);
    let mut ranked = rank(pop, scores);
    let mut trace = Vec::with_capacity(config.generations + 1);
    trace.push(ranked[0].1);
    let m = config.population;
    for generation in 0..config.generations {
        let next = breed(&ranked, config, &mut rng);
        // Survivors keep their scores; only the children need evaluating.
        let survivors = m - m / 4;
        let child_scores = population_fitness(&next[survivors..], puzzle, config);
        let scores: Vec<f64> = ranked[..survivors]
            .iter()
            .map(|(_, s)| *s)
            .chain(child_scores)
            .collect();
        ranked = rank(next, scores);
        trace.push(ranked[0].1);
        if generation % 100 == 0 {
            log::debug!("generation {generation}: best fitness {}", ranked[0].1);
        }
    }
    let (best, best_fitness) = ranked.swap_remove(0);
    Ok(GeneticResult {
        solution: best.to_solution(puzzle),
        best,
        best_fitness,
        trace,
    })
}

/// `generation,best_fitness` rows.
pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("generation,best_fitness\n");
    for (g, f) in trace.iter().enumerate() {
        out.push_str(&format!("{g},{f}\n"));
    }
    out
}

pub fn write_trace_csv(trace: &[f64], path: &Path) -> Result<()> {
    crate::dataset_io::write_atomic(path, trace_csv(trace).as_bytes())
}
