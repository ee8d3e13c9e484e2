//! Random streams.
//!
//! Every simulation draws from a ChaCha8 stream seeded with a 64-bit value.
//! Run `r` of an experiment uses seed `base_seed + r`, so runs are independent
//! and reproducible regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn run_stream(base_seed: u64, run: usize) -> Stream {
    stream(base_seed.wrapping_add(run as u64))
}
