//! Seeded randomness for instance generation and sampling.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`), keyed
//! with `ChaCha8Rng::seed_from_u64(seed)`. ChaCha is a counter-mode stream
//! cipher, so the stream for a given seed is fixed and platform independent.
//!
//! Bernoulli draws do not go through `rand`'s distribution code. A draw with
//! success probability `p = num/den` takes one `u64` word `u` from the stream
//! and succeeds iff `u < floor(p * 2^64)`. Matrices are filled row-major, one
//! word per entry. This is the whole algorithm behind [`GENERATOR_VERSION`].

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;

/// Recorded in instance metadata so readers can tell which stream produced a
/// matrix.
pub const GENERATOR_VERSION: &str = "chacha8-u64-threshold-v1";

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform index in `0..bound` by rejection; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let u = self.next_u64();
            if u < zone {
                return u % bound;
            }
        }
    }

    pub fn inner_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}

/// Threshold `floor(p * 2^64)` for `p` in `[0, 1]`, as a `u128` so that
/// `p = 1` is representable.
pub fn bernoulli_threshold(p: &Rational) -> u128 {
    if !p.is_positive() {
        return 0;
    }
    let scaled: BigInt = (p.numer() << 64u32) / p.denom();
    scaled.to_u128().unwrap_or(u128::MAX).min(1u128 << 64)
}

pub struct Bernoulli {
    threshold: u128,
}

impl Bernoulli {
    pub fn new(p: &Rational) -> Self {
        Bernoulli {
            threshold: bernoulli_threshold(p),
        }
    }

    pub fn draw(&self, rng: &mut SeededRng) -> bool {
        (rng.next_u64() as u128) < self.threshold
    }
}

/// Splits one experiment seed into independent per-purpose seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 finaliser over (base, stream)
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn thresholds() {
        assert_eq!(bernoulli_threshold(&ratio(1, 4)), 1u128 << 62);
        assert_eq!(bernoulli_threshold(&ratio(1, 1)), 1u128 << 64);
        assert_eq!(bernoulli_threshold(&ratio(0, 1)), 0);
        assert_eq!(bernoulli_threshold(&ratio(2, 5)), ((1u128 << 64) * 2) / 5);
    }

    #[test]
    fn stream_is_reproducible() {
        let a: Vec<u64> = {
            let mut r = SeededRng::new(7);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let mut r = SeededRng::new(7);
        let b: Vec<u64> = (0..8).map(|_| r.next_u64()).collect();
        assert_eq!(a, b);
        assert_ne!(a, {
            let mut r = SeededRng::new(8);
            (0..8).map(|_| r.next_u64()).collect::<Vec<_>>()
        });
    }

    #[test]
    fn bernoulli_frequency_is_plausible() {
        let mut rng = SeededRng::new(3);
        let b = Bernoulli::new(&ratio(1, 4));
        let hits = (0..40_000).filter(|_| b.draw(&mut rng)).count();
        // sd of the count is ~87
        assert!((9_500..10_500).contains(&hits), "{hits}");
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SeededRng::new(11);
        for bound in [1u64, 2, 3, 7, 1000] {
            for _ in 0..200 {
                assert!(rng.below(bound) < bound);
            }
        }
    }
}
