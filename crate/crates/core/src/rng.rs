//! Seeded randomness helpers. RNG state is always passed explicitly;
//! nothing here touches global state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Small, fast generator used for internal deterministic sampling
/// (construction-time checks, seed derivation).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Derives a stable per-task seed from a master seed and a task index.
pub fn derive_seed(master: u64, task_index: u64) -> u64 {
    let mut s = SplitMix64::new(master ^ task_index.wrapping_mul(0xd1b5_4a32_d192_ed03));
    s.next_u64()
}

/// Stream RNG used for Monte-Carlo sampling, reproducible from a seed.
pub fn chacha(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
