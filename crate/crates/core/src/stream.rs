// SPDX-License-Identifier: MIT OR Apache-2.0

//! Deterministic RNG stream derivation.
//!
//! Every replication draws from its own ChaCha8 stream keyed by the master
//! seed and a salt path (run index, replication index, ...). Streams are a
//! pure function of `(master, salts)`, so results do not depend on thread
//! count or scheduling.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Collapses a master seed and a salt path into one 64-bit stream id.
pub fn derive_seed(master: u64, salts: &[u64]) -> u64 {
    let mut state = mix(master ^ GOLDEN);
    for &salt in salts {
        state = mix(state.wrapping_add(GOLDEN) ^ mix(salt.wrapping_add(GOLDEN)));
    }
    state
}

/// Expands a 64-bit stream id into a full ChaCha8 key.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        state = mix(state.wrapping_add(GOLDEN));
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
