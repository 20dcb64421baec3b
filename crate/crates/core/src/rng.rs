//! Seeded random streams.
//!
//! Every stochastic procedure takes one 64-bit seed. Replica `i` draws from
//! ChaCha stream `i` of that seed, so results do not depend on how replicas
//! are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn replica_rng(seed: u64, replica: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}
