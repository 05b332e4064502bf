//! Multi-indices `alpha` in `N_0^n` and graded combinatorics.
//!
//! A [`MultiIndex`] is the exponent vector of a monomial `z^alpha`. The
//! canonical ordering used everywhere for basis enumeration, matrix assembly
//! and serialization is *graded lexicographic*: ascending total degree, and
//! within a degree the lexicographically largest exponent vector first, so
//! that degree 3 in two variables enumerates as (3,0), (2,1), (1,2), (0,3).

use num_bigint::BigInt;
use num_traits::One;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

/// Exponent vector of a monomial `z^alpha`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        assert!(!exps.is_empty(), "ambient dimension must be at least 1");
        Self { exps }
    }

    /// The zero index (the constant monomial) in dimension `n`.
    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// The unit index `e_j` (the monomial `z_j`) in dimension `n`.
    pub fn unit(n: usize, j: usize) -> Self {
        assert!(j < n);
        let mut exps = vec![0; n];
        exps[j] = 1;
        Self::new(exps)
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.exps[j]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// `alpha!`, the product of the coordinate factorials.
    pub fn factorial(&self) -> BigInt {
        self.exps.iter().map(|&k| factorial(k)).product()
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, `None` unless `self >= other` everywhere.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.dim(), other.dim());
        self.exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    /// Increment coordinate `j` by one.
    pub fn bump(&self, j: usize) -> Self {
        let mut exps = self.exps.clone();
        exps[j] += 1;
        Self::new(exps)
    }

    /// Falling factorial `alpha! / (alpha - beta)!`, the coefficient produced
    /// by `d^beta z^alpha`. Requires `alpha >= beta` componentwise.
    pub fn falling_factorial(&self, beta: &Self) -> BigInt {
        assert_eq!(self.dim(), beta.dim());
        let mut acc = BigInt::one();
        for (&a, &b) in self.exps.iter().zip(&beta.exps) {
            debug_assert!(a >= b);
            for k in (a - b + 1)..=a {
                acc *= BigInt::from(k);
            }
        }
        acc
    }
}

impl Ord for MultiIndex {
    /// Canonical basis-enumeration order: ascending total degree, then within
    /// a degree the lexicographically larger exponent vector comes first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

// Memoized factorial table: initialized on demand, read-many afterwards.
static FACTORIALS: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

/// `k!` as a big integer.
pub fn factorial(k: u32) -> BigInt {
    let mut table = FACTORIALS.lock().unwrap();
    if table.is_empty() {
        table.push(BigInt::one());
    }
    while table.len() <= k as usize {
        let next = table.last().unwrap() * BigInt::from(table.len());
        table.push(next);
    }
    table[k as usize].clone()
}

/// Binomial coefficient `C(n, k)` in `u64`; panics on overflow.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * u128::from(n - k + i) / u128::from(i);
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// All multi-indices of dimension `n` and total degree exactly `m`, in the
/// canonical order. The list has length `C(n + m - 1, n - 1)`.
pub fn enumerate_degree(n: usize, m: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "ambient dimension must be at least 1");
    let mut out = Vec::with_capacity(binomial((n as u64) + (m as u64) - 1, n as u64 - 1) as usize);
    let mut current = vec![0u32; n];
    fill_degree(&mut current, 0, m, &mut out);
    out
}

fn fill_degree(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for first in (0..=remaining).rev() {
        current[pos] = first;
        fill_degree(current, pos + 1, remaining - first, out);
    }
}

/// All multi-indices of dimension `n` with total degree at most `max_degree`,
/// in the canonical order.
pub fn enumerate_up_to(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    (0..=max_degree)
        .flat_map(|m| enumerate_degree(n, m))
        .collect()
}
