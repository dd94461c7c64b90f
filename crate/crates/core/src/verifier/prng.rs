//! Seeded sampling source.
//!
//! xoshiro256++ seeded through SplitMix64 (`seed_from_u64`). Each draw takes
//! one `next_u64` and keeps its top 53 bits: `u = (x >> 11) * 2^-53`, so `u`
//! is uniform on `[0, 1)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Clone, Debug)]
pub struct Prng(Xoshiro256PlusPlus);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index drawn from `(item, probability)` pairs by inverse CDF.
    pub fn pick<T: Copy>(&mut self, options: &[(T, f64)]) -> T {
        let u = self.next_f64();
        let mut acc = 0.0;
        for (item, p) in options {
            acc += p;
            if u < acc {
                return *item;
            }
        }
        options.last().expect("non-empty options").0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Prng::new(7);
        let mut b = Prng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_f64().to_bits(), b.next_f64().to_bits());
        }
        assert_ne!(Prng::new(7).next_f64(), Prng::new(8).next_f64());
    }

    #[test]
    fn draws_stay_in_unit_interval() {
        let mut r = Prng::new(0);
        assert!((0..10_000).map(|_| r.next_f64()).all(|u| (0.0..1.0).contains(&u)));
    }
}
