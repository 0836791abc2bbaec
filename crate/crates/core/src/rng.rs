//! Named, reproducible random sub-streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A `(seed, label path)` pair. Equal pairs always yield equal draws, and
/// children derived under different labels are statistically independent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    key: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            key: splitmix64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream identified by `label`.
    pub fn derive(&self, label: &str) -> RngStream {
        RngStream {
            seed: self.seed,
            key: splitmix64(self.key ^ fnv1a(label.as_bytes())),
        }
    }

    /// Child stream identified by `label` and an index, e.g. a replicate number.
    pub fn derive_indexed(&self, label: &str, index: u64) -> RngStream {
        let child = self.derive(label);
        RngStream {
            seed: self.seed,
            key: splitmix64(child.key ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d))),
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
