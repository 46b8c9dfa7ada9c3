//! Seeded, counter-based random streams.
//!
//! Every source of randomness in the crate takes a `&mut Rng`. Independent
//! streams for parallel work are derived from one seed with [`stream`], so a
//! run is a pure function of its seed regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of the generator family keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
