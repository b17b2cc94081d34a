//! Deterministic, splittable random streams.
//!
//! Every stochastic step in a run draws from a stream derived from
//! `(master_seed, generation, stream_id)`. The derivation is a pure
//! function, so results never depend on thread scheduling or on how
//! many workers evaluate a generation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A deterministic pseudo-random stream addressed by `(master_seed, generation, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    pub stream_id: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the stream for `(master_seed, generation, stream_id)`.
///
/// The 256-bit ChaCha key is filled by running splitmix64 over a state
/// that has absorbed all three coordinates, so distinct triples yield
/// unrelated streams.
pub fn derive_rng_stream(master_seed: u64, generation: u64, stream_id: u64) -> RngStream {
    let mut state = master_seed;
    let a = splitmix64(&mut state);
    state ^= generation.wrapping_mul(0xd6e8_feb8_6659_fd93);
    let b = splitmix64(&mut state);
    state ^= stream_id.wrapping_mul(0xca5a_8263_9512_1157);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);

    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    RngStream {
        stream_id,
        rng: ChaCha8Rng::from_seed(key),
    }
}

impl RngStream {
    /// Uniform draw in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        use rand::Rng;
        self.rng.gen_range(0..n)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        use rand::Rng;
        self.rng.gen::<f64>()
    }

    /// Bernoulli trial with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        p > 0.0 && (p >= 1.0 || self.unit() < p)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
