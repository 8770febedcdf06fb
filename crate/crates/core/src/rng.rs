//! Seeded, stream-indexed random number generation.
//!
//! Every stochastic path in this crate (signal sampling, Monte Carlo
//! episodes, random optimizer starts) draws from a ChaCha8 generator keyed
//! by a user seed and a stream index. ChaCha output is specified
//! byte-for-byte, so results reproduce across platforms, and per-index
//! streams make parallel execution independent of scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for substream `stream` of the given seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Inverse-CDF exponential draw: `-ln(1 - u) / rate` with `u ~ U[0, 1)`.
///
/// `1 - u` lies in (0, 1], so the result is finite and nonnegative for any
/// positive rate.
pub(crate) fn sample_exponential<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}
