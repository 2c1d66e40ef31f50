//! Reproducible random streams.
//!
//! Replication `r` of a run seeded with `seed` always draws from
//! `stream(seed, r)`, a ChaCha8 generator keyed by `seed` on stream `r`.
//! Results therefore depend only on `(seed, r)`, never on how replications
//! are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
