//! Seeded pseudorandom streams.
//!
//! Each stream is ChaCha8 keyed by the seed, with the stream id selecting the
//! ChaCha stream nonce. Worker streams are therefore derived directly from
//! `(seed, stream_id)` without skipping through any other stream.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RngError {
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(f64, f64),
}

/// Stream id reserved for the sequential engine and the coordinator.
pub const MASTER_STREAM: u64 = 0;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
    stream_id: u64,
}

// 2^53 - 1: the largest 53-bit integer, mapped to exactly 1.0.
const MANTISSA_MAX: f64 = ((1u64 << 53) - 1) as f64;

impl RngStream {
    pub fn derive(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { inner, stream_id }
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in the closed unit interval, from 53 random bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / MANTISSA_MAX
    }

    /// Uniform real in the closed interval `[l, r]`.
    pub fn next_real(&mut self, l: f64, r: f64) -> Result<f64, RngError> {
        if !(l < r) {
            return Err(RngError::EmptyInterval(l, r));
        }
        let v = l + self.next_unit() * (r - l);
        Ok(v.clamp(l, r))
    }

    /// `1` or `-1` with equal probability.
    pub fn next_sign(&mut self) -> i32 {
        if self.next_u64() >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Shorthand for [`RngStream::derive`].
pub fn derive_stream(seed: u64, stream_id: u64) -> RngStream {
    RngStream::derive(seed, stream_id)
}
