//! Stable seed derivation.
//!
//! Every random object in the toolkit (instances, designs, embeddings, CV
//! folds, tour starts) is keyed by a tuple of integers. The tuple is folded
//! through SplitMix64 into a single 64-bit seed, which then keys a ChaCha8
//! stream. ChaCha is counter based, so the same key always yields the same
//! stream regardless of platform or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds an ordered tuple of words into one seed. Order matters and the
/// tuple length is mixed in, so `[a, b]` and `[a, b, 0]` differ.
pub fn mix(words: &[u64]) -> u64 {
    let mut h = splitmix64(words.len() as u64 ^ 0x5EED_5EED_5EED_5EED);
    for &w in words {
        h = splitmix64(h ^ splitmix64(w));
    }
    h
}

/// Domain tags keep streams for different purposes apart even when their
/// numeric keys coincide.
pub mod tag {
    pub const INSTANCE: u64 = 0x1;
    pub const ROTATION: u64 = 0x2;
    pub const DESIGN: u64 = 0x3;
    pub const EMBEDDING: u64 = 0x4;
    pub const CELL: u64 = 0x5;
    pub const CV_FOLDS: u64 = 0x6;
    pub const IC_START: u64 = 0x7;
    pub const SUBSAMPLE: u64 = 0x8;
}

pub fn rng(words: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(words))
}
