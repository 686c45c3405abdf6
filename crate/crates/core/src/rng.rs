//! Reproducible RNG derivation. One master seed fans out to per-purpose
//! seeds (via tag mixing) and per-run ChaCha streams, so simulations can be
//! distributed across workers without losing bit-level determinism.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates related seed values.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derive a purpose-specific seed from a master seed and a textual tag
/// (FNV-1a over the tag, mixed with the master through SplitMix64).
pub fn seed_for(master: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ h)
}

/// RNG for one unit of work: all units share the key derived from `seed`
/// and differ only in the ChaCha stream index, so any subset of units can
/// be replayed independently and in any order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
