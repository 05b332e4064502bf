//! Sparse polynomials over the monomial basis.
//!
//! [`Poly`] is a holomorphic polynomial (a sparse map `MultiIndex ->
//! coefficient`); [`MixedPoly`] is a polynomial in `z` and `zbar` (keyed by a
//! pair of multi-indices). Both are generic over the coefficient so the same
//! machinery serves the exact Gaussian-rational path and the float path used
//! by the weighted module.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;

use crate::multi_index::MultiIndex;
use crate::scalar::CRat;

/// Coefficient ring used by the sparse polynomial containers.
pub trait Coefficient: Clone + PartialEq + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;
    fn from_big_rational(r: &BigRational) -> Self;
    fn to_complex64(&self) -> Complex64;

    fn from_bigint(k: &BigInt) -> Self {
        Self::from_big_rational(&BigRational::from_integer(k.clone()))
    }
}

impl Coefficient for CRat {
    fn zero() -> Self {
        CRat::zero()
    }
    fn one() -> Self {
        CRat::one()
    }
    fn is_zero(&self) -> bool {
        CRat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        CRat::conj(self)
    }
    fn from_big_rational(r: &BigRational) -> Self {
        CRat::real(r.clone())
    }
    fn to_complex64(&self) -> Complex64 {
        CRat::to_complex64(self)
    }
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_big_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn to_complex64(&self) -> Complex64 {
        *self
    }
}

/// A holomorphic polynomial in `n` variables, stored sparsely with no zero
/// coefficients. The degree of the zero polynomial is `None`.
#[derive(Clone, PartialEq)]
pub struct Poly<C: Coefficient> {
    dim: usize,
    terms: BTreeMap<MultiIndex, C>,
}

/// Exact holomorphic polynomial (Gaussian-rational coefficients).
pub type HoloPoly = Poly<CRat>;
/// Float-coefficient holomorphic polynomial (weighted module output).
pub type HoloPoly64 = Poly<Complex64>;

impl<C: Coefficient> Poly<C> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        let mut p = Self::zero(dim);
        p.insert_add(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    /// The monomial `c * z^alpha`.
    pub fn monomial(alpha: MultiIndex, c: C) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.insert_add(alpha, c);
        p
    }

    /// The variable `z_j` in dimension `n`.
    pub fn variable(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), C::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.degree()).max()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C {
        self.terms.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    /// Add `c * z^alpha` in place, dropping the entry if it cancels.
    pub fn insert_add(&mut self, alpha: MultiIndex, c: C) {
        assert_eq!(alpha.dim(), self.dim, "multi-index dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&alpha) {
            None => {
                self.terms.insert(alpha, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(alpha, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.insert_add(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            out.terms.insert(a.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.dim);
        if c.is_zero() {
            return out;
        }
        for (a, k) in &self.terms {
            let prod = k.mul(c);
            if !prod.is_zero() {
                out.terms.insert(a.clone(), prod);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.insert_add(a.add(b), ca.mul(cb));
            }
        }
        out
    }

    /// Multiply by the monomial `z^alpha`.
    pub fn mul_monomial(&self, alpha: &MultiIndex) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            out.terms.insert(a.add(alpha), c.clone());
        }
        out
    }

    /// Partial derivative in the variable `z_j`.
    pub fn derivative(&self, j: usize) -> Self {
        assert!(j < self.dim);
        let mut out = Self::zero(self.dim);
        let e_j = MultiIndex::unit(self.dim, j);
        for (a, c) in &self.terms {
            if let Some(down) = a.checked_sub(&e_j) {
                let k = BigInt::from(a.get(j));
                out.insert_add(down, c.mul(&C::from_bigint(&k)));
            }
        }
        out
    }

    /// Evaluate at a point, with coefficients mapped to `Complex64`.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim, "evaluation point dimension mismatch");
        // Per-variable power tables: each z_j^k is one multiplication.
        let powers: Vec<Vec<Complex64>> = (0..self.dim)
            .map(|j| {
                let max = self.terms.keys().map(|a| a.get(j)).max().unwrap_or(0);
                let mut table = Vec::with_capacity(max as usize + 1);
                table.push(Complex64::new(1.0, 0.0));
                for k in 1..=max as usize {
                    let next = table[k - 1] * z[j];
                    table.push(next);
                }
                table
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, c) in &self.terms {
            let mut term = c.to_complex64();
            for (j, table) in powers.iter().enumerate() {
                term *= table[a.get(j) as usize];
            }
            acc += term;
        }
        acc
    }

    /// The degree-`m` homogeneous part.
    pub fn homogeneous_component(&self, m: u32) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            if a.degree() == m {
                out.terms.insert(a.clone(), c.clone());
            }
        }
        out
    }

    /// Split into homogeneous parts, keyed by degree.
    pub fn homogeneous_split(&self) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (a, c) in &self.terms {
            out.entry(a.degree())
                .or_insert_with(|| Self::zero(self.dim))
                .terms
                .insert(a.clone(), c.clone());
        }
        out
    }

    /// Map coefficients into another ring, dropping zeros.
    pub fn map_coeff<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.dim);
        for (a, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                out.terms.insert(a.clone(), d);
            }
        }
        out
    }
}

impl HoloPoly {
    /// Lossless conversion to the float path.
    pub fn to_float(&self) -> HoloPoly64 {
        self.map_coeff(|c| c.to_complex64())
    }
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})")?;
                for j in 0..self.dim {
                    match a.get(j) {
                        0 => {}
                        1 => write!(f, "*z{}", j + 1)?,
                        k => write!(f, "*z{}^{}", j + 1, k)?,
                    }
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A polynomial in `z` and `zbar`, keyed by the pair (z-exponents,
/// zbar-exponents). Conjugation is an involution swapping the two keys.
#[derive(Clone, PartialEq)]
pub struct MixedPoly<C: Coefficient> {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), C>,
}

/// Exact mixed polynomial.
pub type MixedPolyExact = MixedPoly<CRat>;
/// Float-coefficient mixed polynomial.
pub type MixedPoly64 = MixedPoly<Complex64>;

impl<C: Coefficient> MixedPoly<C> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &C)> {
        self.terms.iter()
    }

    /// The term `c * z^a * zbar^b`.
    pub fn term(a: MultiIndex, b: MultiIndex, c: C) -> Self {
        assert_eq!(a.dim(), b.dim());
        let mut p = Self::zero(a.dim());
        p.insert_add(a, b, c);
        p
    }

    pub fn insert_add(&mut self, a: MultiIndex, b: MultiIndex, c: C) {
        assert_eq!(a.dim(), self.dim);
        assert_eq!(b.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
    }

    /// Embed a holomorphic polynomial (zbar-exponents all zero).
    pub fn from_holo(p: &Poly<C>) -> Self {
        let mut out = Self::zero(p.dim());
        let zero = MultiIndex::zero(p.dim());
        for (a, c) in p.terms() {
            out.terms.insert((a.clone(), zero.clone()), c.clone());
        }
        out
    }

    /// Embed the conjugate of a holomorphic polynomial (a polynomial in zbar).
    pub fn from_conj_holo(p: &Poly<C>) -> Self {
        let mut out = Self::zero(p.dim());
        let zero = MultiIndex::zero(p.dim());
        for (a, c) in p.terms() {
            out.terms.insert((zero.clone(), a.clone()), c.conj());
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for ((a, b), c) in &self.terms {
            out.terms.insert((b.clone(), a.clone()), c.conj());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.insert_add(a.clone(), b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for ((a, b), c) in &self.terms {
            out.terms.insert((a.clone(), b.clone()), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.dim);
        if c.is_zero() {
            return out;
        }
        for ((a, b), k) in &self.terms {
            let prod = k.mul(c);
            if !prod.is_zero() {
                out.terms.insert((a.clone(), b.clone()), prod);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.insert_add(a1.add(a2), b1.add(b2), c1.mul(c2));
            }
        }
        out
    }

    pub fn map_coeff<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> MixedPoly<D> {
        let mut out = MixedPoly::zero(self.dim);
        for ((a, b), c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                out.terms.insert((a.clone(), b.clone()), d);
            }
        }
        out
    }
}

impl MixedPolyExact {
    pub fn to_float(&self) -> MixedPoly64 {
        self.map_coeff(|c| c.to_complex64())
    }
}

impl<C: Coefficient> fmt::Display for MixedPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for j in 0..self.dim {
                match a.get(j) {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    k => write!(f, "*z{}^{}", j + 1, k)?,
                }
            }
            for j in 0..self.dim {
                match b.get(j) {
                    0 => {}
                    1 => write!(f, "*zbar{}", j + 1)?,
                    k => write!(f, "*zbar{}^{}", j + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for MixedPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, j: usize) -> HoloPoly {
        HoloPoly::variable(n, j)
    }

    #[test]
    fn arithmetic_keeps_terms_pruned() {
        let p = z(2, 0).mul(&z(2, 1)); // z1 z2
        let q = p.sub(&p);
        assert!(q.is_zero());
        assert_eq!(q.degree(), None);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn derivative_matches_calculus() {
        // d/dz (z^3) = 3 z^2
        let p = HoloPoly::monomial(MultiIndex::new(vec![3]), CRat::one());
        let dp = p.derivative(0);
        assert_eq!(
            dp,
            HoloPoly::monomial(MultiIndex::new(vec![2]), CRat::from_int(3))
        );
    }

    #[test]
    fn eval_simple_points() {
        // z^2 at 1+i equals 2i
        let p = HoloPoly::monomial(MultiIndex::new(vec![2]), CRat::one());
        let v = p.eval(&[Complex64::new(1.0, 1.0)]);
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        // z1 z2 at (2, 3) equals 6
        let q = z(2, 0).mul(&z(2, 1));
        let v = q.eval(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)]);
        assert!((v - Complex64::new(6.0, 0.0)).norm() < 1e-15);
        // 1 + z at 0 equals 1
        let r = HoloPoly::one(1).add(&z(1, 0));
        let v = r.eval(&[Complex64::new(0.0, 0.0)]);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mixed_conjugation_is_involution() {
        let m = MixedPolyExact::term(
            MultiIndex::new(vec![2, 0]),
            MultiIndex::new(vec![0, 1]),
            CRat::new(
                BigRational::new(BigInt::from(1), BigInt::from(2)),
                BigRational::new(BigInt::from(-1), BigInt::from(3)),
            ),
        );
        assert_eq!(m.conj().conj(), m);
        assert!(m.sub(&m).is_zero());
    }
}
