//! Seed derivation and the pseudo-random generator used everywhere.
//!
//! All randomness flows through [`ChaCha8Rng`], a portable counter-based
//! stream cipher generator. Sub-streams (per provider, per purpose) are
//! derived by mixing a base seed with a salt through SplitMix64, so two
//! different purposes never share a stream even when they share a seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator identifier recorded in every serialized artifact: the
/// algorithm name plus a version for the seed-derivation scheme, bumped if
/// the sub-stream layout ever changes.
pub const GENERATOR_ID: &str = "chacha8-1";

/// Salt for drawing a provider's shared samples.
pub(crate) const SALT_SHARED: u64 = 0x5348_4152_4544_0001;
/// Salt for drawing purchased samples out of a private dataset.
pub(crate) const SALT_PURCHASE: u64 = 0x5055_5243_4841_0002;
/// Salt for sampling market-level parameters (weights, sizes, flip rates).
pub(crate) const SALT_MARKET: u64 = 0x4d41_524b_4554_0003;
/// Salt for per-market seeds inside a multi-market benchmark.
pub(crate) const SALT_BENCH: u64 = 0x4245_4e43_4800_0004;
/// Salt for dataset sampling from the pool.
pub(crate) const SALT_SAMPLE: u64 = 0x5341_4d50_4c45_0005;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a salt into a new 64-bit seed.
pub(crate) fn mix(base: u64, salt: u64) -> u64 {
    let mut state = base;
    let a = splitmix64(&mut state);
    let mut state2 = a ^ salt;
    splitmix64(&mut state2)
}

/// Mixes a base seed with a salt and an index (e.g. a provider id).
pub(crate) fn mix_indexed(base: u64, salt: u64, index: u64) -> u64 {
    mix(mix(base, salt), index.wrapping_add(0x9e37_79b9))
}

/// A fresh generator for the given derived seed.
pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `k` distinct indices out of `0..n`, in draw order, by partial
/// Fisher-Yates. Panics if `k > n`.
pub(crate) fn sample_indices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    use rand::Rng;
    assert!(k <= n, "cannot draw {k} distinct indices from {n}");
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.random_range(0..n - i);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}
