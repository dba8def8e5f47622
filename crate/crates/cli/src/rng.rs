//! Portable sweep generator.
//!
//! Xoshiro256++ seeded from a `u64` by four SplitMix64 outputs (the
//! reference seeding). Floats are `(x >> 11) * 2^-53`, uniform on `[0, 1)`.
//! An integer in `lo..=hi` is `lo + floor(u * (hi - lo + 1))` for one float `u`.
//! Any implementation following these rules reproduces a sweep bit for bit.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct SweepRng {
    inner: Xoshiro256PlusPlus,
}

impl SweepRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`; `lo` when the range is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn integer(&mut self, lo: usize, hi: usize) -> usize {
        let span = (hi - lo + 1) as f64;
        lo + ((self.next_f64() * span) as usize).min(hi - lo)
    }

    /// Log-uniform on `[lo, hi]`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.next_f64();
        if lo == hi {
            return lo;
        }
        (lo.ln() + (hi.ln() - lo.ln()) * u).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn reference(seed: u64, count: usize) -> Vec<u64> {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for v in &mut s {
            *v = splitmix(&mut sm);
        }
        (0..count)
            .map(|_| {
                let out = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
                let t = s[1] << 17;
                s[2] ^= s[0];
                s[3] ^= s[1];
                s[1] ^= s[2];
                s[0] ^= s[3];
                s[2] ^= t;
                s[3] = s[3].rotate_left(45);
                out
            })
            .collect()
    }

    #[test]
    fn matches_reference_construction() {
        for seed in [0, 1, 12345, u64::MAX] {
            let mut r = SweepRng::new(seed);
            let ours: Vec<u64> = (0..8).map(|_| r.next_u64()).collect();
            assert_eq!(ours, reference(seed, 8), "seed {seed}");
        }
    }

    #[test]
    fn ranges() {
        let mut r = SweepRng::new(42);
        for _ in 0..1000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            let k = r.integer(1, 4);
            assert!((1..=4).contains(&k));
            let l = r.log_uniform(0.02, 0.1);
            assert!((0.02..=0.1).contains(&l));
        }
        assert_eq!(r.log_uniform(0.05, 0.05), 0.05);
        assert_eq!(r.integer(3, 3), 3);
    }
}
