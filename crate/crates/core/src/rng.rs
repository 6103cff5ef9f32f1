//! Deterministic pseudo-random number generation for the synthetic generator.
//!
//! The generator is SplitMix64 (Vigna / Steele et al.), chosen because it is
//! tiny, fully specified by three published constants and reproducible
//! bit-for-bit in any language:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! All arithmetic is modulo 2^64. Derived draws are defined on top of the raw
//! stream so that two implementations consuming the same number of draws stay
//! in lockstep:
//!
//! * `next_below(n)` is `next_u64() % n` (modulo bias is irrelevant here,
//!   cross-implementation agreement is what matters),
//! * `chance(p)` converts one draw to a float in [0, 1) using the top 53 bits
//!   and compares it against `p`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 stream seeded with a 64-bit value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform draw in `0..bound`. `bound` must be non-zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// One draw converted to [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw: true with probability `p`. Always consumes one draw.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference outputs of the published splitmix64.c, computed independently.
    #[test]
    fn matches_reference_vectors() {
        let mut r = SplitMix64::new(0);
        let got: [u64; 5] = core::array::from_fn(|_| r.next_u64());
        assert_eq!(
            got,
            [
                0xe220a8397b1dcdaf,
                0x6e789e6aa1b965f4,
                0x06c45d188009454f,
                0xf88bb8a8724c81ec,
                0x1b39896a51a8749b,
            ]
        );

        let mut r = SplitMix64::new(0xDEADBEEF);
        let got: [u64; 5] = core::array::from_fn(|_| r.next_u64());
        assert_eq!(
            got,
            [
                0x4adfb90f68c9eb9b,
                0xde586a3141a10922,
                0x021fbc2f8e1cfc1d,
                0x7466ce737be16790,
                0x3bfa8764f685bd1c,
            ]
        );
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn next_below_stays_in_range() {
        let mut r = SplitMix64::new(7);
        for _ in 0..1000 {
            assert!(r.next_below(13) < 13);
        }
    }

    #[test]
    fn chance_extremes() {
        let mut r = SplitMix64::new(9);
        for _ in 0..100 {
            assert!(!r.chance(0.0));
        }
        for _ in 0..100 {
            assert!(r.chance(1.0));
        }
    }
}
