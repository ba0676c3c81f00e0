//! Throughput of the data-parallel hot paths. Compare builds with
//! `cargo bench` and `cargo bench --no-default-features`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fragsolve::fragments::{Pose2D, Puzzle2D, Solution2D};
use fragsolve::metrics::{evaluate_2d, MetricsConfig};
use fragsolve::par;
use fragsolve::puzzle_gen::{crossing_cuts, GenConfig};
use fragsolve::solver_genetic::{initial_population, population_fitness, GeneticConfig};
use fragsolve::solver_greedy::{GreedyAssembler, GreedyConfig};
use image::{Rgba, RgbaImage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn puzzle(side: u32, min_fragments: usize) -> Puzzle2D {
    let img = RgbaImage::from_fn(side, side, |x, y| Rgba([x as u8, y as u8, (x ^ y) as u8, 255]));
    (0..)
        .map(|seed| crossing_cuts(&img, &GenConfig { n_cuts: 5, seed, ..Default::default() }).unwrap())
        .find(|p| p.len() >= min_fragments)
        .unwrap()
}

fn label(name: &str) -> String {
    let mode = if par::is_parallel() { "parallel" } else { "sequential" };
    format!("{name}/{mode}")
}

fn fitness(c: &mut Criterion) {
    let p = puzzle(384, 10);
    let cfg = GeneticConfig::default();
    let pop = initial_population(&p, &cfg, &mut ChaCha8Rng::seed_from_u64(1));
    c.bench_function(&label("population_fitness"), |b| {
        b.iter(|| population_fitness(black_box(&pop), &p, &cfg))
    });
}

fn greedy_step(c: &mut Criterion) {
    let p = puzzle(512, 12);
    let gt = p.ground_truth.clone().unwrap();
    let cfg = GreedyConfig::default();
    let ids: Vec<String> = p.ids().map(str::to_owned).collect();
    c.bench_function(&label("greedy_step"), |b| {
        b.iter_batched(
            || {
                let mut asm = GreedyAssembler::new(&p, &cfg).unwrap();
                for id in ids.iter().step_by(2) {
                    asm.place_fragment(id, *gt.get(id).unwrap()).unwrap();
                }
                asm
            },
            |mut asm| asm.step(),
            BatchSize::LargeInput,
        )
    });
}

fn evaluate(c: &mut Criterion) {
    let p = puzzle(768, 10);
    let gt = p.ground_truth.as_ref().unwrap();
    let noisy = Solution2D::from_poses(
        gt.poses
            .iter()
            .enumerate()
            .map(|(k, (id, q))| (id.clone(), Pose2D::new(q.x + k as f64, q.y - 2.0, q.theta_deg + 1.5))),
    );
    let cfg = MetricsConfig::default();
    c.bench_function(&label("evaluate_2d"), |b| b.iter(|| evaluate_2d(black_box(&noisy), &p, &cfg).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = fitness, greedy_step, evaluate
}
criterion_main!(benches);
