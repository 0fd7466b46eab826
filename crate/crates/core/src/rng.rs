//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a stream addressed by
//! `(seed, domain, index)`. Trial `t` of an experiment always sees the same
//! numbers no matter how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Substream labels. Disjoint domains never share a ChaCha key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Wishart = 1,
    Channel = 2,
    Noise = 3,
    Message = 4,
    Search = 5,
    User = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream number `index` of `domain` under the root `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> Stream {
    StreamFamily::new(seed, domain).get(index)
}

/// All streams of one domain; cheaper than [`stream`] when drawing many indices.
#[derive(Clone)]
pub struct StreamFamily {
    base: ChaCha8Rng,
}

impl StreamFamily {
    pub fn new(seed: u64, domain: Domain) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed ^ (domain as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        StreamFamily {
            base: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn get(&self, index: u64) -> Stream {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}
