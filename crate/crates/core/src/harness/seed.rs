//! Per-trial seed derivation.
//!
//! `derive_seed(m, t, r) = mix(mix(m) + (t << 8 | r))` where `mix` is the
//! SplitMix64 finalizer. `mix` is a bijection of `u64`, so for a fixed master
//! seed the map `(trial, role) ↦ seed` is injective for `trial < 2^56`.

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, trial: u64, role: u8) -> u64 {
    mix64(mix64(master).wrapping_add((trial << 8) | role as u64))
}
