//! Counter-addressed random streams.
//!
//! Every draw is a pure function of `(seed, stream_index, counter)`: the
//! ChaCha keystream for `seed` and `stream_index` is seeked to a word
//! position derived from `counter`. Sample `i` of an estimator always reads
//! the same words no matter how the sample range is chunked across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Coordinates of a random draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleStream {
    pub seed: u64,
    pub stream_index: u64,
    pub counter: u64,
}

impl SampleStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        SampleStream {
            seed,
            stream_index,
            counter: 0,
        }
    }

    pub fn at(self, counter: u64) -> Self {
        SampleStream { counter, ..self }
    }

    /// A sequential reader positioned at `counter`, where each counter value
    /// owns `words_per_sample` 64-bit words.
    pub fn reader(&self, words_per_sample: u64) -> StreamReader {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        // word_pos counts 32-bit words.
        rng.set_word_pos(u128::from(self.counter) * u128::from(words_per_sample) * 2);
        StreamReader { rng }
    }
}

/// Sequential access to a positioned stream.
pub struct StreamReader {
    rng: ChaCha8Rng,
}

impl StreamReader {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        open01(self.next_u64())
    }
}

/// Maps a word to `(0, 1]`; never returns zero so logarithms stay finite.
#[inline]
pub fn open01(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent seed for a numbered rerun.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // SplitMix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
