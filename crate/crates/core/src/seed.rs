//! Seed handling.
//!
//! Every randomized entry point takes a `u64` seed. Parallel work derives one
//! child seed per task with [`split`], so results depend on the seed and the
//! task index only, never on the number of threads.
//!
//! Splitting rule: `child = mix(seed + GOLDEN * (index + 1))` where `mix` is
//! the SplitMix64 finalizer and all arithmetic wraps modulo 2^64.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for task `index` of a computation seeded with `seed`.
pub fn split(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Trials are grouped in fixed-size chunks; chunk `c` draws from
/// `rng(split(seed, c))`.
pub const CHUNK: usize = 4096;

pub(crate) fn chunks(total: usize) -> impl Iterator<Item = (u64, usize)> {
    (0..total.div_ceil(CHUNK)).map(move |c| {
        let len = CHUNK.min(total - c * CHUNK);
        (c as u64, len)
    })
}
