//! Seed derivation and the single PRNG used across the crate.
//!
//! Every random stage runs on [`ChaCha8Rng`]. Seeds are derived
//! hierarchically (pipeline seed, then scene seed, then stage seed) by
//! hashing the parent seed together with a textual label, so the stream a
//! stage sees depends only on its position in the hierarchy and never on
//! the order in which scenes are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StageRng = ChaCha8Rng;

/// `SHA-256(parent.to_le_bytes() || label)`, first eight bytes little-endian.
pub fn derive_seed(parent: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(word)
}

pub fn stage_rng(parent: u64, label: &str) -> StageRng {
    ChaCha8Rng::seed_from_u64(derive_seed(parent, label))
}

pub fn rng_from_seed(seed: u64) -> StageRng {
    ChaCha8Rng::seed_from_u64(seed)
}
