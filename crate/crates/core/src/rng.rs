//! Seed-derived random streams.
//!
//! Every random draw in the toolkit comes from a stream addressed by
//! `(master seed, purpose tag, indices...)`. Each unit of parallel work
//! (a path, a Monte-Carlo sample, a run) derives its own stream from the
//! address alone, so results are bit-identical no matter how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_pcg::Pcg64Mcg;

/// Stream purposes. Distinct tags keep unrelated consumers of the same
/// master seed statistically independent.
pub mod purpose {
    pub const SIM_PATH: u64 = 0x01;
    pub const SPLIT: u64 = 0x02;
    pub const ROCKET_KERNELS: u64 = 0x03;
    pub const RIDGE_FOLDS: u64 = 0x04;
    pub const OU_MONTE_CARLO: u64 = 0x05;
    pub const RUN: u64 = 0x06;
    pub const INIT: u64 = 0x07;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; full-avalanche mix of one word.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse `(master, tags...)` into a single stream seed.
pub fn stream_seed(master: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for (i, &t) in tags.iter().enumerate() {
        s = splitmix64(s ^ splitmix64(t.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN))));
    }
    s
}

/// Build the stream for an address. The returned generator is consumed
/// sequentially by its owning job; jobs never share a stream.
pub fn stream(master: u64, tags: &[u64]) -> Pcg64Mcg {
    Pcg64Mcg::seed_from_u64(stream_seed(master, tags))
}
