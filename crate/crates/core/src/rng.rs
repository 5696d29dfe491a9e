//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! master seed and a [`Domain`] tag, with the ChaCha stream id selecting the
//! replicate. Jitter replicate `k` of seed `s` is therefore independent of
//! replicate `k + 1` and of the data-simulation stream, yet fully determined
//! by `(s, k)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// What a stream is used for. Distinct domains never share key material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Noise,
    Jitter,
    Simulation,
    Evaluation,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Noise => 0x6e6f_6973_6500_0001,
            Domain::Jitter => 0x6a69_7474_6572_0002,
            Domain::Simulation => 0x7369_6d75_6c00_0003,
            Domain::Evaluation => 0x6576_616c_0000_0004,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for `(seed, domain, index)`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut state = seed ^ domain.tag();
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
