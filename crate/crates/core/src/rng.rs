//! Reproducible per-trial random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Independent stream for `(seed, stream)`; the same pair always yields the same sequence.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Stream key for trial `t` at system size `n`.
pub fn stream_key(n: u64, t: u64) -> u64 {
    (n << 32) ^ t
}
