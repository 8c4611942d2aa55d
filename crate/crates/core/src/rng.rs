//! Seeded, splittable random streams.
//!
//! Every random choice in the engine draws from a ChaCha stream derived from
//! the user seed and a fixed per-purpose tag, so results never depend on
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

/// Fixed stream tags.
pub mod tags {
    pub const DOMAIN_PROBE: u64 = 1;
    pub const PREKEY: u64 = 2;
    pub const MODULAR_PRIMES: u64 = 3;
    pub const SAMPLING: u64 = 4;
    pub const MODULAR_REDUCTION: u64 = 5;
}
