//! Seeded, splittable random streams.
//!
//! Every Monte Carlo path owns a ChaCha8 generator keyed by the run seed and
//! selected by the path index through the cipher's stream id, so path `m`
//! draws the same numbers however the ensemble is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

/// Generator for path `index` of the run keyed by `seed`.
pub fn path_rng(seed: u64, index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives an independent run seed, e.g. one per scale in a sweep.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
