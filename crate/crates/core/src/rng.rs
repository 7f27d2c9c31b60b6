//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by the run seed
//! and selected by `(purpose, index)` through the 64-bit ChaCha stream id:
//! the purpose tag fills the top 8 bits and the index the low 56 bits.
//! Streams are independent of the order in which they are requested, so
//! replicates can be generated in parallel and still reproduce bit for bit.
//! The algorithm is fixed by the pinned `rand_chacha` version.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Graph = 1,
    Data = 2,
    Ordering = 3,
    Latent = 4,
}

const INDEX_BITS: u32 = 56;

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    assert!(index < (1 << INDEX_BITS), "stream index {index} exceeds 56 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << INDEX_BITS) | index);
    rng
}

/// Index of ordering `k` of replicate `graph` when each graph gets
/// `per_graph` orderings.
pub fn ordering_index(graph: u64, k: u64, per_graph: u64) -> u64 {
    graph * per_graph + k
}
