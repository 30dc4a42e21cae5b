//! The one random source used across the crate.
//!
//! Every seeded operation draws from ChaCha8 initialised through
//! `SeedableRng::seed_from_u64`. ChaCha output is platform independent, so a
//! seed names the same stream everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A stream derived from `seed` and independent of every other `stream` id.
pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
