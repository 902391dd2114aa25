//! Seeded random datasets and query instances.
//!
//! Coordinates are integers in `[0, 128]`, terms come from a vocabulary of at
//! most 8 words and weights are integers in `[1, 10]`, which keeps exact ties
//! rare and brute-force checks instant.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Fixture;
use crate::object::{Point, QueryObject, StObject, TermVector};
use crate::similarity::SimParams;

pub const COORD_MAX: i64 = 128;
pub const MAX_VOCAB: usize = 8;

/// Deterministic generator for a (seed, stream) pair. Distinct streams of one
/// seed are independent, so trials can be generated in any order.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn vocabulary(vocab: usize) -> Vec<String> {
    (0..vocab.clamp(1, MAX_VOCAB))
        .map(|i| format!("t{i}"))
        .collect()
}

fn random_terms(rng: &mut impl Rng, words: &[String]) -> TermVector {
    let n = rng.gen_range(1..=words.len().min(3));
    words
        .choose_multiple(rng, n)
        .map(|w| (w.clone(), rng.gen_range(1..=10) as f64))
        .collect()
}

fn random_point(rng: &mut impl Rng) -> Point {
    Point::new(
        rng.gen_range(0..=COORD_MAX) as f64,
        rng.gen_range(0..=COORD_MAX) as f64,
    )
}

pub fn random_objects(rng: &mut impl Rng, n: usize, vocab: usize) -> Vec<StObject> {
    let words = vocabulary(vocab);
    (0..n)
        .map(|i| {
            let loc = random_point(rng);
            StObject::new(format!("o{i}"), loc, random_terms(rng, &words))
        })
        .collect()
}

pub fn random_query(rng: &mut impl Rng, vocab: usize) -> QueryObject {
    let words = vocabulary(vocab);
    let loc = random_point(rng);
    QueryObject::new(loc, random_terms(rng, &words))
}

/// Dataset written by `rstknn gen`.
pub fn generate_dataset(seed: u64, n: usize, vocab: usize) -> Vec<StObject> {
    random_objects(&mut rng_for(seed, 0), n, vocab)
}

/// Ranges from which random query instances are drawn.
#[derive(Debug, Clone)]
pub struct InstanceConfig {
    pub min_n: usize,
    pub max_n: usize,
    pub fanouts: Vec<usize>,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub vocab: usize,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            min_n: 2,
            max_n: 64,
            fanouts: vec![2, 4],
            ks: vec![1, 2, 3, 4],
            alphas: vec![0.0, 0.4, 0.7, 1.0],
            vocab: MAX_VOCAB,
        }
    }
}

pub fn random_fixture(rng: &mut impl Rng, cfg: &InstanceConfig) -> Fixture {
    let n = rng.gen_range(cfg.min_n..=cfg.max_n);
    let fanout = *cfg.fanouts.choose(rng).expect("fanouts");
    let k = *cfg.ks.choose(rng).expect("ks");
    let alpha = *cfg.alphas.choose(rng).expect("alphas");
    let vocab = rng.gen_range(1..=cfg.vocab.clamp(1, MAX_VOCAB));
    let objects = random_objects(rng, n, vocab);
    let query = random_query(rng, vocab);
    Fixture {
        objects,
        query,
        params: SimParams::new(alpha, k).expect("configured parameters are valid"),
        fanout,
        layout: None,
    }
}
