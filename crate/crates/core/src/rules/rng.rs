use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seedable, platform-independent source of all game randomness.
///
/// ChaCha8 seeded with `seed_from_u64`; every draw is one call to
/// `gen_range(0..len)` over `u64`, so a log of draw indices is portable
/// between 32- and 64-bit hosts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRng(ChaCha8Rng);

impl GameRng {
    pub fn seeded(seed: u64) -> Self {
        GameRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform index in `0..len`. `len` must be positive.
    pub fn index(&mut self, len: usize) -> u64 {
        self.0.gen_range(0..len as u64)
    }

    /// Fair coin flip.
    pub fn coin(&mut self) -> bool {
        self.0.gen_bool(0.5)
    }
}

/// SplitMix64 finalizer; derives independent sub-seeds from a match seed.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
