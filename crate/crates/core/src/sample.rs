//! Deterministic sampling of polynomials, forms and operators for the
//! seeded verification suites.
//!
//! A tiny SplitMix64 generator keeps the randomized suites reproducible
//! across platforms and toolchains without external dependencies; every
//! suite records the seed it ran with.

use crate::form::{increasing_tuples, PForm};
use crate::multi_index::enumerate_up_to;
use crate::poly::HoloPoly;
use crate::scalar::CRat;

/// SplitMix64: the 64-bit finalizer-based generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (`bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Small signed rational with numerator in `-9..=9` and denominator in
    /// `1..=4`; never returns zero.
    pub fn small_rational(&mut self) -> CRat {
        loop {
            let num = self.below(19) as i64 - 9;
            if num == 0 {
                continue;
            }
            let den = self.below(4) as i64 + 1;
            return CRat::from_ratio(num, den);
        }
    }

    /// Small Gaussian rational; real with probability 1/2.
    pub fn small_gaussian_rational(&mut self) -> CRat {
        let re = self.small_rational();
        if self.below(2) == 0 {
            re
        } else {
            let im = self.small_rational();
            &re + &(&im * &CRat::i())
        }
    }

    /// Sparse random polynomial of degree at most `max_deg` with roughly
    /// `terms` monomials (never the zero polynomial).
    pub fn poly(&mut self, n: usize, max_deg: u32, terms: usize) -> HoloPoly {
        let monomials = enumerate_up_to(n, max_deg);
        loop {
            let mut f = HoloPoly::zero(n);
            for _ in 0..terms.max(1) {
                let alpha = monomials[self.below(monomials.len() as u64) as usize].clone();
                f.insert_add(alpha, self.small_gaussian_rational());
            }
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// Random (p,0)-form with every component populated.
    pub fn form(&mut self, n: usize, p: usize, max_deg: u32, terms: usize) -> PForm {
        let mut u = PForm::zero(n, p);
        for key in increasing_tuples(n, p) {
            u.add_component(&key, self.poly(n, max_deg, terms));
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = SplitMix64::new(8);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn sampled_forms_have_requested_shape() {
        let mut rng = SplitMix64::new(42);
        let u = rng.form(3, 2, 4, 3);
        assert_eq!(u.dim(), 3);
        assert_eq!(u.degree(), 2);
        assert!(u.poly_degree().unwrap() <= 4);
        assert_eq!(u.components().count(), 3);
    }
}
