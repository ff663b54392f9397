//! Splittable random streams.
//!
//! A master seed plus a [`Purpose`] selects a ChaCha8 key; the item index
//! selects the ChaCha stream. Any item's randomness is therefore a pure
//! function of `(seed, purpose, index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Premium,
    Idiosyncratic,
    Permutation,
    MdsInit,
    Synthetic,
    Sampling,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Premium => 0x5052_454d,
            Purpose::Idiosyncratic => 0x4944_494f,
            Purpose::Permutation => 0x5045_524d,
            Purpose::MdsInit => 0x4d44_5349,
            Purpose::Synthetic => 0x5359_4e54,
            Purpose::Sampling => 0x5341_4d50,
        }
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Returns the generator for item `index` of `purpose` under `seed`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let key = mix(seed ^ mix(purpose.tag()));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
