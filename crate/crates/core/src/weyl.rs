//! Normal-ordered polynomial-coefficient differential operators.
//!
//! A [`WeylOperator`] is a finite sum of terms `c * z^a * d^b` acting on
//! holomorphic polynomials, stored in normal order (all multiplications to
//! the left of all derivatives). Normal order is canonical, so two operators
//! are equal iff their term maps are equal; composition rewrites `d_j z_j`
//! into `z_j d_j + 1` exhaustively, which makes commutator identities exact
//! equalities of term maps.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::{Coefficient, HoloPoly};
use crate::scalar::CRat;

/// A normal-ordered operator `sum c * z^a * d^b` in `n` variables.
#[derive(Clone, PartialEq)]
pub struct WeylOperator {
    dim: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), CRat>,
}

impl WeylOperator {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, CRat::one())
    }

    pub fn scalar(dim: usize, c: CRat) -> Self {
        let mut op = Self::zero(dim);
        op.insert_add(MultiIndex::zero(dim), MultiIndex::zero(dim), c);
        op
    }

    /// Multiplication by `z_j`.
    pub fn z_var(dim: usize, j: usize) -> Self {
        let mut op = Self::zero(dim);
        op.insert_add(MultiIndex::unit(dim, j), MultiIndex::zero(dim), CRat::one());
        op
    }

    /// Differentiation `d/dz_j`.
    pub fn d_var(dim: usize, j: usize) -> Self {
        let mut op = Self::zero(dim);
        op.insert_add(MultiIndex::zero(dim), MultiIndex::unit(dim, j), CRat::one());
        op
    }

    /// The single normal-ordered term `c * z^a * d^b`.
    pub fn term(a: MultiIndex, b: MultiIndex, c: CRat) -> Self {
        assert_eq!(a.dim(), b.dim());
        let mut op = Self::zero(a.dim());
        op.insert_add(a, b, c);
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &CRat)> {
        self.terms.iter()
    }

    pub fn insert_add(&mut self, a: MultiIndex, b: MultiIndex, c: CRat) {
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
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
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
            out.terms.insert((a.clone(), b.clone()), -c);
        }
        out
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = Self::zero(self.dim);
        if c.is_zero() {
            return out;
        }
        for ((a, b), k) in &self.terms {
            out.insert_add(a.clone(), b.clone(), k * c);
        }
        out
    }

    /// True when no term carries a `z`-factor (constant coefficients).
    pub fn is_constant_coefficient(&self) -> bool {
        self.terms.keys().all(|(a, _)| a.degree() == 0)
    }

    /// Degree of the operator terms in the derivatives, `None` when zero.
    pub fn derivative_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, b)| b.degree()).max()
    }

    /// `Some(d)` when every term is a pure derivative of the same order `d`.
    pub fn homogeneous_derivative_degree(&self) -> Option<u32> {
        let mut deg = None;
        for (_, b) in self.terms.keys() {
            match deg {
                None => deg = Some(b.degree()),
                Some(d) if d == b.degree() => {}
                _ => return None,
            }
        }
        deg
    }

    /// Exact linear action on a polynomial:
    /// `z^a d^b . z^g = (g!/(g-b)!) z^{g-b+a}` when `g >= b`, else 0.
    pub fn apply(&self, f: &HoloPoly) -> Result<HoloPoly> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.dim(),
            });
        }
        let mut out = HoloPoly::zero(self.dim);
        for ((a, b), c) in &self.terms {
            for (gamma, d) in f.terms() {
                if let Some(down) = gamma.checked_sub(b) {
                    let coeff = c.mul(d).mul(&CRat::from_bigint(gamma.falling_factorial(b)));
                    out.insert_add(down.add(a), coeff);
                }
            }
        }
        Ok(out)
    }

    /// Normal-ordered product. Uses the rewrite
    /// `d^b z^a = sum_k C(b,k) C(a,k) k! z^{a-k} d^{b-k}` coordinatewise,
    /// so that `compose(A, B).apply(f) = A.apply(B.apply(f))` for all `f`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = Self::zero(self.dim);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let c12 = c1 * c2;
                for k in below(b1, a2) {
                    // C(b1,k) C(a2,k) k! = (b1)_k (a2)_k / k!
                    let num = b1.falling_factorial(&k) * a2.falling_factorial(&k);
                    let coeff: BigInt = num / k.factorial();
                    out.insert_add(
                        a1.add(&a2.checked_sub(&k).unwrap()),
                        b2.add(&b1.checked_sub(&k).unwrap()),
                        c12.mul(&CRat::from_bigint(coeff)),
                    );
                }
            }
        }
        Ok(out)
    }

    /// `[A, B] = AB - BA`, normal-ordered.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.compose(other)?.sub(&other.compose(self)?))
    }

    /// Formal adjoint of a constant-coefficient operator in the Gaussian
    /// inner product: conjugate the coefficients and replace `d^b` by the
    /// multiplication operator `z^b`.
    pub fn formal_adjoint_constant(&self) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for ((a, b), c) in &self.terms {
            if a.degree() != 0 {
                return Err(Error::NonConstantCoefficient {
                    term: format!("({c})*z^{a}*d^{b}"),
                });
            }
            out.insert_add(b.clone(), a.clone(), c.conj());
        }
        Ok(out)
    }
}

/// All multi-indices `k` with `k <= min(x, y)` componentwise.
fn below(x: &MultiIndex, y: &MultiIndex) -> Vec<MultiIndex> {
    let n = x.dim();
    let cap: Vec<u32> = (0..n).map(|j| x.get(j).min(y.get(j))).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        out.push(MultiIndex::new(cur.clone()));
        // Odometer increment.
        let mut pos = n;
        for j in (0..n).rev() {
            if cur[j] < cap[j] {
                pos = j;
                break;
            }
            cur[j] = 0;
        }
        if pos == n {
            return out;
        }
        cur[pos] += 1;
    }
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Each term-map entry renders as one or two grammar terms (the real
        // and imaginary parts of the coefficient), so parse . print is the
        // identity on normal-ordered operators.
        let mut rendered: Vec<(bool, String)> = Vec::new();
        for ((a, b), c) in &self.terms {
            let mut factors = String::new();
            for j in 0..self.dim {
                match a.get(j) {
                    0 => {}
                    1 => factors.push_str(&format!("*z{}", j + 1)),
                    k => factors.push_str(&format!("*z{}^{}", j + 1, k)),
                }
            }
            for j in 0..self.dim {
                match b.get(j) {
                    0 => {}
                    1 => factors.push_str(&format!("*d{}", j + 1)),
                    k => factors.push_str(&format!("*d{}^{}", j + 1, k)),
                }
            }
            for (part, imag) in [(&c.re, false), (&c.im, true)] {
                use num_traits::Signed;
                if num_traits::Zero::is_zero(part) {
                    continue;
                }
                let negative = part.is_negative();
                let mag = if negative {
                    -part.clone()
                } else {
                    part.clone()
                };
                let suffix = if imag { "i" } else { "" };
                let body = if factors.is_empty() {
                    format!("{mag}{suffix}")
                } else if !imag && num_traits::One::is_one(&mag) {
                    factors[1..].to_string()
                } else {
                    format!("{mag}{suffix}{factors}")
                };
                rendered.push((negative, body));
            }
        }
        for (i, (negative, body)) in rendered.iter().enumerate() {
            if i == 0 {
                if *negative {
                    write!(f, "-")?;
                }
            } else if *negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Operator grammar
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := coeff | ('z'|'d') INDEX ('^' POSINT)?
//   coeff  := INT ('/' INT)? 'i'? | 'i'
//
// Whitespace-insensitive; INDEX is 1-based and must not exceed the ambient
// dimension. A Gaussian-rational coefficient `a/b + c/d i` is written as the
// sum of two terms, which normal ordering recombines.
// ---------------------------------------------------------------------------

/// Parse an operator expression in the grammar above.
pub fn parse_weyl(input: &str, dim: usize) -> Result<WeylOperator> {
    assert!(dim >= 1);
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
        dim,
    };
    let op = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::Parse {
            position: p.pos,
            message: format!("unexpected `{}`", p.rest_preview()),
        });
    }
    Ok(op)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn rest_preview(&self) -> String {
        let rest = &self.bytes[self.pos..];
        let take = rest.len().min(12);
        String::from_utf8_lossy(&rest[..take]).into_owned()
    }

    fn expr(&mut self) -> Result<WeylOperator> {
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                b'-' => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<WeylOperator> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.compose(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<WeylOperator> {
        match self.peek() {
            Some(b'z') | Some(b'd') => self.op_factor(),
            Some(b'i') => {
                self.pos += 1;
                Ok(WeylOperator::scalar(self.dim, CRat::i()))
            }
            Some(c) if c.is_ascii_digit() => self.coeff_factor(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let sym = self.ident();
                Err(Error::UnknownSymbol {
                    symbol: sym,
                    position: start,
                })
            }
            _ => Err(Error::Parse {
                position: self.pos,
                message: format!("expected a factor, found `{}`", self.rest_preview()),
            }),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse {
                position: self.pos,
                message: "expected an integer".into(),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|e| Error::Parse {
                position: start,
                message: format!("integer out of range: {e}"),
            })
    }

    fn op_factor(&mut self) -> Result<WeylOperator> {
        self.skip_ws();
        let start = self.pos;
        let kind = self.bytes[self.pos];
        self.pos += 1;
        if !self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                position: self.pos,
                message: format!("`{}` needs a variable index", kind as char),
            });
        }
        let index = self.integer()? as usize;
        if index == 0 || index > self.dim {
            return Err(Error::UnknownSymbol {
                symbol: format!("{}{}", kind as char, index),
                position: start,
            });
        }
        let mut power = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let p = self.integer()?;
            if p == 0 {
                return Err(Error::Parse {
                    position: self.pos,
                    message: "exponent must be positive".into(),
                });
            }
            power = u32::try_from(p).map_err(|_| Error::Parse {
                position: self.pos,
                message: "exponent out of range".into(),
            })?;
        }
        let mut exps = vec![0u32; self.dim];
        exps[index - 1] = power;
        let e = MultiIndex::new(exps);
        let zero = MultiIndex::zero(self.dim);
        Ok(match kind {
            b'z' => WeylOperator::term(e, zero, CRat::one()),
            _ => WeylOperator::term(zero, e, CRat::one()),
        })
    }

    fn coeff_factor(&mut self) -> Result<WeylOperator> {
        let num = self.integer()?;
        let mut den = 1u64;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            den = self.integer()?;
            if den == 0 {
                return Err(Error::Parse {
                    position: self.pos,
                    message: "zero denominator".into(),
                });
            }
        }
        let rational = BigRational::new(BigInt::from(num), BigInt::from(den));
        let mut c = CRat::real(rational);
        if self.peek() == Some(b'i') {
            self.pos += 1;
            c = &c * &CRat::i();
        }
        Ok(WeylOperator::scalar(self.dim, c))
    }
}
