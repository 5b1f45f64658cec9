use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifies the generator and sampling procedure recorded in every plan:
/// ChaCha20 keyed by `seed_from_u64`, bounded draws by rejection on the
/// low end of `u64`, and a partial Fisher-Yates shuffle.
pub const GENERATOR_ID: &str = "chacha20-seed_from_u64/rejection/fisher-yates-v1";

pub struct SeededSampler {
    rng: ChaCha20Rng,
}

impl SeededSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Values under 2^64 mod bound would bias the remainder.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.rng.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }

    /// `k` distinct indices from `0..n`, in draw order. The first `k` draws
    /// do not depend on `k`, so smaller samples are prefixes of larger ones.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_distinct() {
        let a = SeededSampler::new(42).sample_indices(100, 10);
        let b = SeededSampler::new(42).sample_indices(100, 10);
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
        assert!(a.iter().all(|&i| i < 100));
        assert_ne!(a, SeededSampler::new(43).sample_indices(100, 10));
    }

    #[test]
    fn smaller_samples_are_prefixes() {
        let big = SeededSampler::new(7).sample_indices(50, 20);
        let small = SeededSampler::new(7).sample_indices(50, 5);
        assert_eq!(&big[..5], &small[..]);
    }

    #[test]
    fn roughly_uniform() {
        let mut s = SeededSampler::new(1);
        let mut counts = [0usize; 6];
        for _ in 0..60_000 {
            counts[s.below(6) as usize] += 1;
        }
        assert!(counts.iter().all(|&c| (9_000..11_000).contains(&c)));
    }
}
