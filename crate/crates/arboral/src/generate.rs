//! Instance generators for experiments and tests.
//!
//! All patterns are deterministic. `random` draws a uniform permutation
//! from a fixed, versioned construction: a ChaCha8 stream keyed by the
//! 64-bit seed drives a Fisher-Yates shuffle whose bounded draws use
//! unbiased rejection sampling on `next_u64`. No platform- or
//! library-version-dependent sampling is involved, so a (pattern, n, seed)
//! triple names the same instance everywhere, forever.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::geometry::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Keys 1..=n in order.
    Sequential,
    /// Keys n..=1.
    Reverse,
    /// Uniform random permutation from the seeded generator.
    Random,
    /// Key at time t is 1 + bit-reverse(t - 1); n must be a power of two.
    BitReversal,
    /// Alternate the smallest and largest remaining keys.
    Zigzag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub pattern: Pattern,
    pub n: u32,
    /// Consumed by `Random`; ignored by the deterministic patterns.
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("instance length must be at least 1")]
    ZeroLength,
    #[error("bit_reversal needs a power-of-two length, got {n}")]
    NotPowerOfTwo { n: u32 },
}

pub fn generate(spec: GeneratorSpec) -> Result<Instance, GenerateError> {
    if spec.n == 0 {
        return Err(GenerateError::ZeroLength);
    }
    let n = spec.n;
    let access: Vec<u32> = match spec.pattern {
        Pattern::Sequential => (1..=n).collect(),
        Pattern::Reverse => (1..=n).rev().collect(),
        Pattern::Random => {
            let mut keys: Vec<u32> = (1..=n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            fisher_yates(&mut keys, &mut rng);
            keys
        }
        Pattern::BitReversal => {
            if !n.is_power_of_two() {
                return Err(GenerateError::NotPowerOfTwo { n });
            }
            let bits = n.trailing_zeros();
            (0..n)
                .map(|t| {
                    let rev = if bits == 0 { 0 } else { t.reverse_bits() >> (32 - bits) };
                    rev + 1
                })
                .collect()
        }
        Pattern::Zigzag => {
            let (mut lo, mut hi) = (1, n);
            (0..n)
                .map(|t| {
                    if t % 2 == 0 {
                        let k = lo;
                        lo += 1;
                        k
                    } else {
                        let k = hi;
                        hi -= 1;
                        k
                    }
                })
                .collect()
        }
    };
    Ok(Instance::new(access).expect("generated sequences are permutations"))
}

fn fisher_yates(keys: &mut [u32], rng: &mut ChaCha8Rng) {
    for i in (1..keys.len()).rev() {
        let j = bounded_u64(rng, i as u64 + 1) as usize;
        keys.swap(i, j);
    }
}

/// Uniform draw from 0..bound via rejection. `bound >= 1`.
fn bounded_u64(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    // threshold = 2^64 mod bound; everything at or above it is a fair zone
    // whose size is a multiple of bound.
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let r = rng.next_u64();
        if r >= threshold {
            return r % bound;
        }
    }
}

/// All permutations of 1..=n in lexicographic order. Intended for small n
/// (the callers keep n <= 8; 8! = 40320).
pub fn enumerate_permutations(n: u32) -> impl Iterator<Item = Instance> {
    let first: Option<Vec<u32>> = if n == 0 { None } else { Some((1..=n).collect()) };
    LexPermutations { current: first }
}

struct LexPermutations {
    current: Option<Vec<u32>>,
}

impl Iterator for LexPermutations {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        let current = self.current.take()?;
        let item = Instance::new(current.clone()).expect("permutation");
        let mut next = current;
        if advance(&mut next) {
            self.current = Some(next);
        }
        Some(item)
    }
}

/// In-place lexicographic successor; false when `a` was the last one.
fn advance(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
