//! Seeded, splittable random streams.
//!
//! Every trial of an experiment draws from its own ChaCha stream selected by
//! `(master seed, trial index)`. Streams with distinct indices never overlap,
//! so trials can run in any order or in parallel and still reproduce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream for a single stand-alone computation.
pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` under the master `seed`.
pub fn trial_rng(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
