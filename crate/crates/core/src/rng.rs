//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit `u64` seed and draws from a
//! ChaCha stream keyed by it; independent trials use `trial_seed`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `trial`-th independent replicate of an experiment seeded
/// with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_add(trial)
}
