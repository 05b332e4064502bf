//! Shared fixtures for the criterion benches.

use fock_complex::sample::SplitMix64;
use fock_complex::{HoloPoly, PForm};

/// Deterministic polynomial fixture.
pub fn sample_poly(seed: u64, n: usize, degree: u32, terms: usize) -> HoloPoly {
    SplitMix64::new(seed).poly(n, degree, terms)
}

/// Deterministic form fixture with every component populated.
pub fn sample_form(seed: u64, n: usize, p: usize, degree: u32, terms: usize) -> PForm {
    SplitMix64::new(seed).form(n, p, degree, terms)
}

/// A closed (p+1,0)-form obtained by differentiating a random p-form.
pub fn closed_form(seed: u64, n: usize, p: usize, degree: u32) -> PForm {
    let w = sample_form(seed, n, p, degree, 3);
    fock_complex::dbar::partial(&w).expect("below top degree")
}
