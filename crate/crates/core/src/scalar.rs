//! The exact scalar tower.
//!
//! Polynomial coefficients are Gaussian rationals ([`CRat`]): complex numbers
//! with exact rational real and imaginary parts. Gaussian-weight inner
//! products additionally carry an integer power of pi symbolically
//! ([`ExactScalar`]), so that identities such as the energy decompositions
//! become machine-checkable equalities instead of tolerance checks.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A Gaussian rational: exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(k: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn from_bigint(k: BigInt) -> Self {
        Self::real(BigRational::from_integer(k))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|c|^2` as an exact rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Exact inverse; panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero Gaussian rational");
        let n = self.norm_sq();
        Self::new(&self.re / &n, -&self.im / &n)
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        CRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &CRat {
    type Output = CRat;
    #[allow(clippy::suspicious_arithmetic_impl)] // division as multiplication by the exact inverse
    fn div(self, rhs: &CRat) -> CRat {
        self * &rhs.inv()
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parse an exact rational written as `p/q` or `p` (decimal-free).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    t.parse::<BigRational>().map_err(|e| Error::Parse {
        position: 0,
        message: format!("invalid rational `{t}`: {e}"),
    })
}

/// An exact value `c * pi^k` with `c` a Gaussian rational.
///
/// Every Gaussian inner product of polynomials in `n` variables is of this
/// form with `k = n`, so sums of such inner products stay exact. Addition is
/// only defined within a common power of pi (or with zero); mixing powers is
/// a programming error and panics.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactScalar {
    coeff: CRat,
    pi_pow: i32,
}

impl ExactScalar {
    pub fn new(coeff: CRat, pi_pow: i32) -> Self {
        if coeff.is_zero() {
            Self {
                coeff: CRat::zero(),
                pi_pow: 0,
            }
        } else {
            Self { coeff, pi_pow }
        }
    }

    pub fn zero() -> Self {
        Self::new(CRat::zero(), 0)
    }

    pub fn one() -> Self {
        Self::new(CRat::one(), 0)
    }

    pub fn rational_times_pi(r: BigRational, pi_pow: i32) -> Self {
        Self::new(CRat::real(r), pi_pow)
    }

    pub fn coeff(&self) -> &CRat {
        &self.coeff
    }

    pub fn pi_pow(&self) -> i32 {
        self.pi_pow
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.coeff.is_real()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeff.conj(), self.pi_pow)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.pi_pow, other.pi_pow,
            "cannot add exact scalars with distinct powers of pi"
        );
        Self::new(&self.coeff + &other.coeff, self.pi_pow)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.coeff, self.pi_pow)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.coeff * &other.coeff, self.pi_pow + other.pi_pow)
    }

    pub fn scale(&self, c: &CRat) -> Self {
        Self::new(&self.coeff * c, self.pi_pow)
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        Self::new(self.coeff.scale(r), self.pi_pow)
    }

    pub fn scale_integer(&self, k: i64) -> Self {
        self.scale_rational(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Compare two real exact scalars. Signs are compared first (valid for
    /// any powers of pi since pi > 0); equal-sign comparisons require a
    /// common power of pi.
    pub fn cmp_real(&self, other: &Self) -> Ordering {
        assert!(
            self.is_real() && other.is_real(),
            "ordering needs real scalars"
        );
        let sa = sign_of(&self.coeff.re);
        let sb = sign_of(&other.coeff.re);
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        assert_eq!(
            self.pi_pow, other.pi_pow,
            "cannot order same-sign exact scalars with distinct powers of pi"
        );
        self.coeff.re.cmp(&other.coeff.re)
    }

    pub fn to_complex64(&self) -> Complex64 {
        self.coeff.to_complex64() * std::f64::consts::PI.powi(self.pi_pow)
    }

    /// Float value of a real exact scalar.
    pub fn to_f64(&self) -> f64 {
        debug_assert!(self.is_real());
        self.coeff.re.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.pi_pow)
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let c = if self.coeff.is_real() || self.coeff.re.is_zero() {
            format!("{}", self.coeff)
        } else {
            format!("({})", self.coeff)
        };
        match self.pi_pow {
            0 => write!(f, "{c}"),
            1 => write!(f, "{c}·π"),
            k => write!(f, "{c}·π^{k}"),
        }
    }
}
