//! Reproducible random substreams.
//!
//! A single master seed is expanded into independent ChaCha streams keyed by
//! the work unit that consumes them. Keys never depend on scheduling, so a run
//! produces the same numbers on one thread or on many.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a substream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    NodePlacement = 1,
    Shadowing = 2,
    RangeStudy = 3,
    FisherOracle = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the 64-bit key for `(seed, purpose, indices...)`.
pub fn substream_key(seed: u64, purpose: Purpose, indices: &[u64]) -> u64 {
    let mut key = splitmix64(seed ^ splitmix64(purpose as u64));
    for &i in indices {
        key = splitmix64(key ^ splitmix64(i.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    key
}

/// Opens the substream for `(seed, purpose, indices...)`.
///
/// Shadowing draws use indices `[trial, node, anchor]`; the sample index is
/// the draw position within that stream.
pub fn substream(seed: u64, purpose: Purpose, indices: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(substream_key(seed, purpose, indices))
}
