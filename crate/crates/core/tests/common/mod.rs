#![allow(dead_code)]

use mixed_hodge::framed::{sample_framing, FramedMhs};
use mixed_hodge::linalg::{c, Scalar};
use mixed_hodge::mhs::{random_hodge_tate_sample, HodgeTateSample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 5 radii in `[0.1, 0.9]` times 4 angles away from the real axis.
pub fn disc_grid() -> Vec<Scalar> {
    let radii = [0.1, 0.3, 0.5, 0.7, 0.9];
    let angles = [-2.5, -1.1, 0.7, 2.2];
    radii
        .iter()
        .flat_map(|&r| angles.iter().map(move |&t: &f64| c(r * t.cos(), r * t.sin())))
        .collect()
}

/// A few points outside the unit disc, reached along the principal ray.
pub fn outer_points() -> Vec<Scalar> {
    vec![c(1.5, 1.0), c(-2.0, 0.5), c(3.0, -0.7), c(0.2, -1.7)]
}

/// Hodge-Tate block layout of total dimension at most 6, deterministic in `seed`.
pub fn random_blocks(seed: u64) -> Vec<(i32, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let steps = rng.random_range(1..=4usize);
    let top: i32 = 2 * rng.random_range(-1..=1);
    let mut left = 6usize;
    let mut blocks = Vec::new();
    for s in 0..steps {
        let remaining = steps - s - 1;
        let max_d = (left - remaining).min(2);
        let d = rng.random_range(1..=max_d);
        left -= d;
        blocks.push((top - 2 * s as i32, d));
    }
    blocks
}

pub struct Case {
    pub seed: u64,
    pub blocks: Vec<(i32, usize)>,
    pub sample: HodgeTateSample,
}

pub fn random_suite(count: u64) -> Vec<Case> {
    (0..count)
        .map(|seed| {
            let blocks = random_blocks(seed);
            let sample = random_hodge_tate_sample(&blocks, seed, 1.0).expect("valid sample");
            Case { seed, blocks, sample }
        })
        .collect()
}

/// Every `(a, b)`-framing of a sample with `a > b`, one per pair of block weights.
pub fn framings(case: &Case) -> Vec<FramedMhs> {
    let weights: Vec<i32> = case.sample.blocks.iter().map(|(w, _)| w / 2).collect();
    let mut out = Vec::new();
    for &a in &weights {
        for &b in &weights {
            if a > b {
                out.push(sample_framing(&case.sample, a, b).expect("sample framing"));
            }
        }
    }
    out
}
