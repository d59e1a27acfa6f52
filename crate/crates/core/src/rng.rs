//! The crate's pseudorandom generator.
//!
//! Every stochastic operation is driven by ChaCha8 seeded from a 64-bit
//! integer through `SeedableRng::seed_from_u64`. Runs are reproducible within
//! a build; no cross-implementation bit equality is promised.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SearchRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}
