//! (p,0)-forms with polynomial coefficients.
//!
//! A [`Form`] maps strictly increasing index tuples `J` (0-based internally,
//! 1-based in serialized output) to polynomial components `u_J`. Wedge signs
//! are resolved by counting transpositions into increasing order, and the
//! adjoint conventions elsewhere in the crate use the same signed coefficient
//! so that adjointness is an exact theorem of the implementation.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::inner_gaussian;
use crate::poly::{Coefficient, Poly};
use crate::scalar::{CRat, ExactScalar};

/// A (p,0)-form `sum'_J u_J dz_J` with coefficients in `Poly<C>`.
#[derive(Clone, PartialEq)]
pub struct Form<C: Coefficient> {
    dim: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Poly<C>>,
}

/// Exact (p,0)-form.
pub type PForm = Form<CRat>;
/// Float-coefficient (p,0)-form (weighted adjoints, Galerkin output).
pub type PForm64 = Form<Complex64>;

impl<C: Coefficient> Form<C> {
    /// The zero (p,0)-form in dimension `n`.
    pub fn zero(n: usize, p: usize) -> Self {
        assert!(n >= 1);
        assert!(p <= n, "form degree cannot exceed the dimension");
        Self {
            dim: n,
            degree: p,
            components: BTreeMap::new(),
        }
    }

    /// A 0-form from a polynomial.
    pub fn scalar(f: Poly<C>) -> Self {
        let mut form = Self::zero(f.dim(), 0);
        form.add_component(&[], f);
        form
    }

    /// Build from labelled components; keys must be strictly increasing.
    pub fn from_components(
        n: usize,
        p: usize,
        components: impl IntoIterator<Item = (Vec<usize>, Poly<C>)>,
    ) -> Result<Self> {
        let mut form = Self::zero(n, p);
        for (key, poly) in components {
            if key.len() != p || !strictly_increasing(&key) || key.iter().any(|&j| j >= n) {
                return Err(Error::Parse {
                    position: 0,
                    message: format!(
                        "invalid component index {key:?} for a ({p},0)-form in dimension {n}"
                    ),
                });
            }
            if poly.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: poly.dim(),
                });
            }
            form.add_component(&key, poly);
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Largest polynomial degree among components, `None` when zero.
    pub fn poly_degree(&self) -> Option<u32> {
        self.components.values().filter_map(|f| f.degree()).max()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly<C>)> {
        self.components.iter()
    }

    pub fn component(&self, key: &[usize]) -> Option<&Poly<C>> {
        self.components.get(key)
    }

    /// Add `poly` to the component at the (strictly increasing) key.
    pub fn add_component(&mut self, key: &[usize], poly: Poly<C>) {
        debug_assert!(key.len() == self.degree && strictly_increasing(key));
        debug_assert!(key.iter().all(|&j| j < self.dim));
        if poly.is_zero() {
            return;
        }
        match self.components.remove(key) {
            None => {
                self.components.insert(key.to_vec(), poly);
            }
            Some(old) => {
                let sum = old.add(&poly);
                if !sum.is_zero() {
                    self.components.insert(key.to_vec(), sum);
                }
            }
        }
    }

    /// Signed coefficient `u_{jK}` of the antisymmetric extension: zero when
    /// `j` is in `K`, otherwise the sign of sorting `j` into `K` times the
    /// component at the sorted tuple.
    pub fn signed_component(&self, j: usize, k_set: &[usize]) -> Option<(i8, &Poly<C>)> {
        let (sign, key) = wedge_insert(j, k_set)?;
        self.components.get(&key).map(|f| (sign, f))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (key, poly) in &other.components {
            out.add_component(key, poly.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (key, poly) in &self.components {
            out.components.insert(key.clone(), poly.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (key, poly) in &self.components {
            let s = poly.scale(c);
            if !s.is_zero() {
                out.components.insert(key.clone(), s);
            }
        }
        out
    }

    pub fn map_coeff<D: Coefficient>(&self, f: impl Fn(&C) -> D + Copy) -> Form<D> {
        let mut out = Form::zero(self.dim, self.degree);
        for (key, poly) in &self.components {
            let mapped = poly.map_coeff(f);
            if !mapped.is_zero() {
                out.components.insert(key.clone(), mapped);
            }
        }
        out
    }

    /// Apply a polynomial map componentwise, dropping zero results.
    pub fn map_components(&self, f: impl Fn(&Poly<C>) -> Poly<C>) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (key, poly) in &self.components {
            let mapped = f(poly);
            if !mapped.is_zero() {
                out.components.insert(key.clone(), mapped);
            }
        }
        out
    }
}

impl PForm {
    /// Exact Gaussian inner product of two forms of the same degree.
    pub fn inner_gaussian(&self, other: &Self) -> Result<ExactScalar> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        assert_eq!(self.degree, other.degree, "form degrees must match");
        let mut acc = ExactScalar::zero();
        for (key, u) in &self.components {
            if let Some(v) = other.components.get(key) {
                acc = acc.add(&inner_gaussian(u, v)?);
            }
        }
        Ok(acc)
    }

    /// `||u||^2 = sum'_J ||u_J||^2`, exact.
    pub fn norm_sq(&self) -> ExactScalar {
        self.inner_gaussian(self).expect("same form")
    }

    pub fn to_float(&self) -> PForm64 {
        self.map_coeff(|c| c.to_complex64())
    }
}

fn strictly_increasing(key: &[usize]) -> bool {
    key.windows(2).all(|w| w[0] < w[1])
}

/// Sort `j` into the strictly increasing tuple `set`: returns the sign
/// `(-1)^t` (t = number of entries less than `j`) and the enlarged tuple, or
/// `None` when `j` already occurs (`dz_j ^ dz_j = 0`).
pub fn wedge_insert(j: usize, set: &[usize]) -> Option<(i8, Vec<usize>)> {
    if set.contains(&j) {
        return None;
    }
    let pos = set.iter().take_while(|&&k| k < j).count();
    let mut out = Vec::with_capacity(set.len() + 1);
    out.extend_from_slice(&set[..pos]);
    out.push(j);
    out.extend_from_slice(&set[pos..]);
    let sign = if pos % 2 == 0 { 1 } else { -1 };
    Some((sign, out))
}

/// Remove the entry at `position` from a strictly increasing tuple, with the
/// matching sign `(-1)^position`.
pub fn wedge_remove(set: &[usize], position: usize) -> (i8, usize, Vec<usize>) {
    let j = set[position];
    let mut rest = set.to_vec();
    rest.remove(position);
    let sign = if position.is_multiple_of(2) { 1 } else { -1 };
    (sign, j, rest)
}

/// All strictly increasing p-tuples in `{0, .., n-1}`, lexicographic.
pub fn increasing_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(n, p, j + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, p, 0, &mut cur, &mut out);
    out
}

impl<C: Coefficient> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, poly) in &self.components {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({poly})")?;
            for (i, j) in key.iter().enumerate() {
                if i == 0 {
                    write!(f, "·dz{}", j + 1)?;
                } else {
                    write!(f, "∧dz{}", j + 1)?;
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
