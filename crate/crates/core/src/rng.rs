// SPDX-License-Identifier: Apache-2.0

//! Counter-based random streams.
//!
//! Every stochastic routine draws from a ChaCha stream keyed by
//! `(seed, stream)`, so ensemble members are reproducible regardless of
//! which thread runs them or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
