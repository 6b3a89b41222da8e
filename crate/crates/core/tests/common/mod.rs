#![allow(dead_code)]

use fuim::generate::{generate, GeneratorConfig};
use fuim::QuantitativeDatabase;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: usize = 200;
pub const QUANTILES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Small random database number `index` of the fixed corpus.
pub fn corpus_db(index: usize) -> QuantitativeDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0_0000 + index as u64);
    let cfg = GeneratorConfig {
        items: rng.random_range(5..=8),
        transactions: rng.random_range(10..=30),
        avg_len: rng.random_range(2.0..4.5),
        quantity_min: 1,
        quantity_max: 6,
        utility_mu: 1.5,
        utility_sigma: 0.8,
        popularity_sigma: 0.6,
        seed: rng.random(),
    };
    generate(&cfg).expect("corpus config is valid")
}

/// Thresholds at fixed quantiles of the 1-item fuub values.
pub fn quantile_gammas(fuubs: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = fuubs.iter().copied().filter(|f| *f > 0.0).collect();
    v.sort_by(f64::total_cmp);
    QUANTILES
        .iter()
        .map(|q| v[((v.len() - 1) as f64 * q).round() as usize])
        .collect()
}
