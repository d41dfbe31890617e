//! Role-tagged random substreams.
//!
//! Every vector in a codebook comes from its own ChaCha20 stream: the 64-bit
//! user seed is expanded into the ChaCha key (`SeedableRng::seed_from_u64`),
//! and the stream id packs a role tag in the top byte with a per-vector index
//! in the low 56 bits. Vector `i` of a role therefore never depends on how
//! many other vectors were generated, or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const INDEX_MASK: u64 = (1 << 56) - 1;

/// Which family of concepts a substream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Role {
    Node = 1,
    EdgeId = 2,
    Size = 3,
    Attribute = 4,
    /// Free-form streams for experiments (capacity trials, dataset sampling).
    Experiment = 5,
}

/// A deterministic generator for `(seed, role, index)`.
pub fn substream(seed: u64, role: Role, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((role as u64) << 56) | (index & INDEX_MASK));
    rng
}

/// 56-bit FNV-1a hash of an attribute key, used as its stream index.
pub fn key_index(key: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in key.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash & INDEX_MASK
}
