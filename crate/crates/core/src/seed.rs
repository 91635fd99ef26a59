//! Named, splittable seeds.
//!
//! Every random choice in the crate flows from a single `u64` through named
//! splits, so an experiment is reproduced bit-for-bit from its top-level seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Derives an independent child seed for the stream called `label`.
    pub fn split(self, label: &str) -> Seed {
        // FNV-1a over the label, then mixed with the parent.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in label.bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Seed(splitmix64(self.0 ^ splitmix64(h)))
    }

    /// Derives the child seed for the `index`-th item of a numbered stream.
    pub fn split_index(self, index: u64) -> Seed {
        Seed(splitmix64(self.0.wrapping_add(splitmix64(index ^ 0xA076_1D64_78BD_642F))))
    }

    pub fn rng(self) -> SeededRng {
        SeededRng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}
