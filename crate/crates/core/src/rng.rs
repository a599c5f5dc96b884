//! Seeded random streams.
//!
//! Every random consumer in the crate receives its own ChaCha8 stream derived
//! from a master seed and a stream id, so results never depend on the order
//! in which parallel jobs finish.
//!
//! Derivation: the master seed is expanded by `ChaCha8Rng::seed_from_u64` and
//! the stream id selects the ChaCha stream (`set_stream`). Nested ids (repeat,
//! fold, tree) are first folded into a single `u64` with [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a child id into a parent seed.
pub fn derive_seed(parent: u64, child: u64) -> u64 {
    mix(parent ^ mix(child.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Stream ids used for the distinct consumers of one seed.
pub mod streams {
    pub const FOLDS: u64 = 1;
    pub const VOTE_TIES: u64 = 2;
    pub const SYNTH: u64 = 3;
    /// Tree `i` uses stream `TREE_BASE + i`.
    pub const TREE_BASE: u64 = 1 << 32;
}
