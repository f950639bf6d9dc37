//! Seeded randomness for data generation and fixtures.
//!
//! All randomness flows through [`ChaCha8Rng`] seeded with
//! `SeedableRng::seed_from_u64`, so a `(seed, call sequence)` pair replays
//! bit-for-bit on every platform. Normal deviates come from
//! `rand_distr::StandardNormal` (ziggurat).

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::DenseMatrix;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// i.i.d. N(0, 1) entries, drawn in column-major order.
pub fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = StandardNormal.sample(rng);
    }
    m
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}
