//! Counter-based random streams.
//!
//! Every consumer derives its generator from `(seed, key)`, and per-sample
//! work selects ChaCha stream `j`, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for the stream identified by `seed` and a key path.
pub fn stream(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for &k in key {
        h = splitmix64(h ^ splitmix64(k.wrapping_add(0x5851_F42D_4C95_7F2D)));
    }
    let mut bytes = [0u8; 32];
    for (i, chunk) in bytes.chunks_mut(8).enumerate() {
        h = splitmix64(h.wrapping_add(i as u64));
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

/// Substream `j` of [`stream`]`(seed, key)`.
pub fn substream(seed: u64, key: &[u64], j: u64) -> ChaCha8Rng {
    let mut rng = stream(seed, key);
    rng.set_stream(j);
    rng
}

/// Stable 64-bit tag for a string label, for use in key paths.
pub fn tag(label: &str) -> u64 {
    label.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01B3)
    })
}
