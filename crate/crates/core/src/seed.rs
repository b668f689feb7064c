//! Seed splitting for parallel restarts.
//!
//! Every restart gets its own generator derived from `(master, index)`, so a
//! parallel run is bit-identical to a sequential one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed used by the command-line front end.
pub const DEFAULT_SEED: u64 = 0x5EED;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn restart_rng(master: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index as u64))
}
