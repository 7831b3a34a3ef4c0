//! Seeded random streams.
//!
//! Every simulation draws from a ChaCha8 generator keyed by a 64-bit seed.
//! Independent replications share the seed and differ only in the ChaCha
//! stream number, so replication `r` of a run seeded with `s` is always
//! `stream_rng(s, r)` regardless of how many replications run or in what
//! order. The benchmark harness packs its cell coordinates into the stream
//! number (see [`crate::benchmark::replication_stream`]).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard exponential variate by inversion, `-ln(1 - U)`.
#[inline]
pub(crate) fn unit_exponential<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}
