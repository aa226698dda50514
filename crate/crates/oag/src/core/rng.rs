//! Deterministic random streams.
//!
//! Every trial owns two independent streams: the *environment* stream feeds
//! the guide-source and trust coins, the *algorithm* stream feeds the base
//! algorithm's own sampling. Keeping them separate makes a guided run at
//! `tau = 0` reproduce the plain run answer-for-answer under the same
//! algorithm seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// The two per-trial random streams.
#[derive(Debug, Clone)]
pub struct RngStreams {
    pub env: ChaCha12Rng,
    pub alg: ChaCha12Rng,
}

impl RngStreams {
    pub fn from_seeds(env_seed: u64, alg_seed: u64) -> Self {
        RngStreams {
            env: ChaCha12Rng::seed_from_u64(env_seed),
            alg: ChaCha12Rng::seed_from_u64(alg_seed),
        }
    }
}

/// One Bernoulli draw with success probability `p`.
///
/// Always consumes exactly one value from the stream, even for `p` in
/// {0, 1}: forced coins still advance the stream so that runs at different
/// `(beta, tau)` stay aligned draw-for-draw.
pub fn coin(rng: &mut dyn RngCore, p: f64) -> bool {
    let x: f64 = rand::Rng::gen(rng);
    x < p
}

pub(crate) fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable seed derivation for a trial: mixes the master seed with the grid
/// and trial indices and splits the result into (environment, algorithm)
/// seeds. Identical inputs always derive identical seeds.
pub fn derive_seeds(master: u64, grid_index: u64, trial: u64) -> (u64, u64) {
    let a = splitmix64(master ^ splitmix64(grid_index));
    let b = splitmix64(a ^ splitmix64(trial));
    (splitmix64(b ^ 0x656e_7600_u64), splitmix64(b ^ 0x616c_6700_u64))
}
