/// Derives an independent 64-bit seed for sub-stream `stream` of `seed`.
///
/// SplitMix64 finalizer over `seed + (stream + 1) * φ`. Sub-seeds depend only
/// on the pair, so adding trials or rounds never perturbs existing ones.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
