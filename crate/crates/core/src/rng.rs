//! Seed expansion into independent random streams.
//!
//! A run seed is expanded with one SplitMix64 step per stream, mixing in the
//! stream tag, and the result seeds a ChaCha8 generator. Streams never share
//! state, so a change in how one component draws numbers does not perturb
//! the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Initial Latin hypercube designs.
    Sampling = 1,
    /// Kriging hyperparameter search.
    HyperSearch = 2,
    /// Parent selection, crossover and mutation.
    Variation = 3,
    /// Random picks in population initialization and replacement.
    Replacement = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of `stream` derived from the run seed.
pub fn stream_seed(seed: u64, stream: Stream) -> u64 {
    splitmix64(seed ^ splitmix64(stream as u64))
}

pub fn stream_rng(seed: u64, stream: Stream) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(seed, stream))
}
