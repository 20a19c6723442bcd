//! Deterministic random substreams.
//!
//! Every consumer of randomness gets its own ChaCha8 generator keyed by
//! `(master_seed, trial, purpose)`. The master seed fixes the ChaCha key, the
//! trial index and purpose select one of the 2^64 independent streams, so
//! results never depend on which worker runs which trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a substream is used for inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    BaseStations = 1,
    Surfaces = 2,
    Fading = 3,
    Alignment = 4,
    Auxiliary = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for `purpose` within `trial` of a run seeded by `master_seed`.
pub fn substream(master_seed: u64, trial: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(splitmix64(trial.wrapping_mul(8).wrapping_add(purpose as u64)));
    rng
}

/// Generator for a standalone experiment (tests, examples) keyed by a label.
pub fn labelled(master_seed: u64, label: &str) -> ChaCha8Rng {
    let key = label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(splitmix64(key));
    rng
}
