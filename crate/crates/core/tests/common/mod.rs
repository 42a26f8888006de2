#![allow(dead_code)]

use lxcim_core::{Dataset, Label, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const D0_CSV: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/d0.csv");
pub const D0_JSONL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/d0.jsonl");

pub fn d0() -> Dataset {
    Dataset::from_parts(&[-4.0, -3.0, 1.0, 2.0], &[0, 1, 0, 1], None).unwrap()
}

/// N in [1, 256], weights in (0, 2], no score at 0. Every other seed draws
/// scores from a coarse grid, so ties and mirrored confidences are common.
pub fn mixed_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=256);
    let coarse = seed % 2 == 1;
    (0..n)
        .map(|_| {
            let score = if coarse {
                let k: i32 = rng.random_range(1..=8);
                if rng.random::<bool>() { k as f64 / 4.0 } else { -k as f64 / 4.0 }
            } else {
                loop {
                    let s: f64 = rng.random_range(-1.0..=1.0);
                    if s != 0.0 {
                        break s;
                    }
                }
            };
            let label = Label::from(rng.random::<bool>());
            let weight = 2.0 * (1.0 - rng.random::<f64>());
            Sample::new(score, label, weight).unwrap()
        })
        .collect()
}

pub fn mixed_datasets(count: u64) -> impl Iterator<Item = Dataset> {
    (0..count).map(mixed_dataset)
}
