//! The Gaussian Fock space: exact inner products, the reproducing kernel,
//! the Bergman projection, the Volterra primitive, and the two witness
//! series that exhibit the unboundedness of the ladder operators.
//!
//! The monomials `z^alpha` are orthogonal with `||z^alpha||^2 = pi^n alpha!`,
//! so every inner product of polynomials is an exact Gaussian rational times
//! `pi^n` and lives in [`ExactScalar`].

use num_complex::Complex64;
use num_rational::BigRational;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::{HoloPoly, MixedPolyExact};
use crate::scalar::{CRat, ExactScalar};

/// `||z^alpha||^2 = pi^n * alpha!`, exactly.
pub fn monomial_norm_sq(alpha: &MultiIndex) -> ExactScalar {
    ExactScalar::rational_times_pi(
        BigRational::from_integer(alpha.factorial()),
        alpha.dim() as i32,
    )
}

/// Exact Gaussian inner product `(f, g) = int f conj(g) e^{-|z|^2}`.
///
/// Bilinear extension of `(z^alpha, z^beta) = delta_{alpha beta} pi^n alpha!`;
/// conjugate-linear in the second slot.
pub fn inner_gaussian(f: &HoloPoly, g: &HoloPoly) -> Result<ExactScalar> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let mut acc = ExactScalar::zero();
    // Iterate over the sparser operand.
    for (alpha, cf) in f.terms() {
        let cg = g.coeff(alpha);
        if cg.is_zero() {
            continue;
        }
        let pair = cf * &cg.conj();
        acc = acc.add(&ExactScalar::new(pair, 0).mul(&monomial_norm_sq(alpha)));
    }
    Ok(acc)
}

/// `||f||^2` in the Gaussian weight, exactly.
pub fn norm_sq_gaussian(f: &HoloPoly) -> ExactScalar {
    inner_gaussian(f, f).expect("same polynomial")
}

/// Coefficients of `f` against the orthonormal basis `z^alpha / sqrt(pi^n alpha!)`.
///
/// Parseval: the squared moduli sum to `||f||^2`.
pub fn to_orthonormal(f: &HoloPoly) -> BTreeMap<MultiIndex, Complex64> {
    let mut out = BTreeMap::new();
    for (alpha, c) in f.terms() {
        let scale = monomial_norm_sq(alpha).to_f64().sqrt();
        out.insert(alpha.clone(), c.to_complex64() * scale);
    }
    out
}

/// Truncated Bergman kernel `pi^{-n} sum_{k<=N} (z . conj(w))^k / k!`.
///
/// Converges to `pi^{-n} exp(z . conj(w))` as the cutoff grows.
pub fn kernel_truncated(z: &[Complex64], w: &[Complex64], cutoff: u32) -> Complex64 {
    assert_eq!(z.len(), w.len(), "kernel arguments must share a dimension");
    let dot: Complex64 = z.iter().zip(w).map(|(a, b)| a * b.conj()).sum();
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = term;
    for k in 1..=cutoff {
        term *= dot / (k as f64);
        acc += term;
    }
    acc * std::f64::consts::PI.powi(-(z.len() as i32))
}

/// Kernel diagonal `K(z, z) = e^{|z|^2} / pi^n`, the concrete constant in the
/// pointwise bound `|f(z)|^2 <= K(z, z) ||f||^2`.
pub fn kernel_diagonal(z: &[Complex64]) -> f64 {
    let norm_sq: f64 = z.iter().map(|a| a.norm_sqr()).sum();
    norm_sq.exp() * std::f64::consts::PI.powi(-(z.len() as i32))
}

/// Evaluate `f` at `z` through the reproducing pairing `(f, K(. , z))`,
/// using kernel terms up to `deg f`. Exact for polynomials up to rounding.
pub fn reproduce(f: &HoloPoly, z: &[Complex64]) -> Complex64 {
    assert_eq!(z.len(), f.dim(), "evaluation point dimension mismatch");
    // K(., z) has orthonormal coefficients conj(phi_alpha(z)); pair them with
    // the orthonormal coefficients of f.
    let mut acc = Complex64::new(0.0, 0.0);
    for (alpha, f_on) in to_orthonormal(f) {
        let mut phi = Complex64::new(1.0, 0.0);
        for (j, zj) in z.iter().enumerate() {
            phi *= zj.powu(alpha.get(j));
        }
        let norm = monomial_norm_sq(&alpha).to_f64().sqrt();
        acc += f_on * (phi / norm);
    }
    acc
}

/// Orthogonal projection of a mixed polynomial onto the holomorphic
/// polynomials in the Gaussian weight, exactly.
///
/// The coefficient of `z^gamma` is `(m, z^gamma) / ||z^gamma||^2`; for a term
/// `c z^a zbar^b` the pairing selects `gamma = a - b` and contributes
/// `c * a! / gamma!`.
pub fn bergman_project_gaussian(m: &MixedPolyExact) -> HoloPoly {
    let mut out = HoloPoly::zero(m.dim());
    for ((a, b), c) in m.terms() {
        if let Some(gamma) = a.checked_sub(b) {
            // a! / gamma! = falling factorial of a over b.
            let ratio = a.falling_factorial(b);
            out.insert_add(gamma, c * &CRat::from_bigint(ratio));
        }
    }
    out
}

/// The unique primitive with zero constant term (one variable).
///
/// On the orthonormal basis, `T(phi_k) = phi_{k+1} / sqrt(k+1)`.
pub fn volterra_primitive(f: &HoloPoly) -> Result<HoloPoly> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.dim(),
        });
    }
    let mut out = HoloPoly::zero(1);
    for (alpha, c) in f.terms() {
        let k = alpha.get(0);
        let den = BigRational::from_integer((k + 1).into());
        out.insert_add(MultiIndex::new(vec![k + 1]), c.scale(&den.recip()));
    }
    Ok(out)
}

/// Which unboundedness witness from the one-variable theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `F = sum_{k>=2} phi_k / sqrt(k(k-1))`: in the space, but `F' = a(F)` is not.
    F,
    /// `G = sum_{k>=0} phi_k / (k+1)`: in the space, but `z G = a*(G)` is not.
    G,
}

/// A witness series, given by its coefficient rule against the orthonormal
/// basis `phi_k`.
#[derive(Clone, Copy, Debug)]
pub struct WitnessSeries {
    pub kind: WitnessKind,
}

impl WitnessSeries {
    pub fn new(kind: WitnessKind) -> Self {
        Self { kind }
    }

    /// Orthonormal coefficient of `phi_k`.
    pub fn coefficient(&self, k: u32) -> f64 {
        match self.kind {
            WitnessKind::F => {
                if k >= 2 {
                    1.0 / ((k as f64) * (k as f64 - 1.0)).sqrt()
                } else {
                    0.0
                }
            }
            WitnessKind::G => 1.0 / (k as f64 + 1.0),
        }
    }

    /// `(||s_N||^2, ||a(s_N)||^2)` for F, `(||s_N||^2, ||a*(s_N)||^2)` for G,
    /// where `s_N` is the partial sum through `phi_N`.
    ///
    /// The first component stays bounded in `N`; the second is a harmonic sum
    /// and grows without bound, witnessing unboundedness of the operator.
    pub fn partial_norms(&self, cutoff: u32) -> (f64, f64) {
        assert!(cutoff >= 2, "witness partial sums need at least two terms");
        match self.kind {
            WitnessKind::F => {
                // a(phi_k) = sqrt(k) phi_{k-1}, so a(s_N) = sum_{k=1}^{N-1} phi_k / sqrt(k).
                let norm: f64 = (2..=cutoff)
                    .map(|k| 1.0 / ((k as f64) * (k as f64 - 1.0)))
                    .sum();
                let image: f64 = (1..cutoff).map(|k| 1.0 / k as f64).sum();
                (norm, image)
            }
            WitnessKind::G => {
                // a*(phi_k) = sqrt(k+1) phi_{k+1}, so a*(s_N) = sum_{k=1}^{N+1} phi_k / sqrt(k).
                let norm: f64 = (0..=cutoff).map(|k| (1.0 / (k as f64 + 1.0)).powi(2)).sum();
                let image: f64 = (1..=cutoff + 1).map(|k| 1.0 / k as f64).sum();
                (norm, image)
            }
        }
    }
}

/// Exact orthonormal-coefficient helpers used by the compactness surrogates:
/// `||phi_k||`-normalized tail and graph quantities for a coefficient vector.
pub fn tail_norm_sq(coeffs: &[BigRational], keep_through: usize) -> BigRational {
    coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| *k > keep_through)
        .map(|(_, c)| c * c)
        .sum()
}

/// `sum_k (1 + k) |c_k|^2` for a one-variable orthonormal coefficient vector:
/// the squared graph norm `||f||^2 + ||f'||^2`.
pub fn graph_norm_sq_coeffs(coeffs: &[BigRational]) -> BigRational {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * c * BigRational::from_integer((k as u32 + 1).into()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn mono(exps: Vec<u32>, c: CRat) -> HoloPoly {
        HoloPoly::monomial(MultiIndex::new(exps), c)
    }

    #[test]
    fn monomial_norms_match_the_formula() {
        // alpha = (0,0): pi^2
        let n = monomial_norm_sq(&MultiIndex::new(vec![0, 0]));
        assert_eq!(n, ExactScalar::rational_times_pi(rat(1, 1), 2));
        // alpha = (1,2): 2 pi^2
        let n = monomial_norm_sq(&MultiIndex::new(vec![1, 2]));
        assert_eq!(n, ExactScalar::rational_times_pi(rat(2, 1), 2));
        // alpha = (3), n = 1: 6 pi
        let n = monomial_norm_sq(&MultiIndex::new(vec![3]));
        assert_eq!(n, ExactScalar::rational_times_pi(rat(6, 1), 1));
    }

    #[test]
    fn inner_products_are_exact() {
        let z1 = HoloPoly::variable(2, 0);
        let z2 = HoloPoly::variable(2, 1);
        assert_eq!(
            inner_gaussian(&z1, &z1).unwrap(),
            ExactScalar::rational_times_pi(rat(1, 1), 2)
        );
        assert!(inner_gaussian(&z1, &z2).unwrap().is_zero());
        let zsq = mono(vec![2], CRat::one());
        assert_eq!(
            inner_gaussian(&zsq, &zsq).unwrap(),
            ExactScalar::rational_times_pi(rat(2, 1), 1)
        );
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let f = mono(vec![1], CRat::new(rat(1, 2), rat(1, 3)));
        let g = mono(vec![1], CRat::new(rat(2, 1), rat(-1, 5)));
        let fg = inner_gaussian(&f, &g).unwrap();
        let gf = inner_gaussian(&g, &f).unwrap();
        assert_eq!(fg.conj(), gf);
    }

    #[test]
    fn orthonormal_coefficients() {
        // f = z maps to sqrt(pi) at alpha = (1); scaling f by 1/sqrt(pi)
        // would give the basis vector phi_1 with coefficient exactly 1.
        let f = HoloPoly::variable(1, 0);
        let coeffs = to_orthonormal(&f);
        let c = coeffs[&MultiIndex::new(vec![1])];
        assert!((c.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((c.re / std::f64::consts::PI.sqrt() - 1.0).abs() < 1e-15);
        // z^2 maps to sqrt(2 pi) at alpha = (2).
        let g = mono(vec![2], CRat::one());
        let c = to_orthonormal(&g)[&MultiIndex::new(vec![2])];
        assert!((c.re - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!(to_orthonormal(&HoloPoly::zero(1)).is_empty());
    }

    #[test]
    fn parseval_ties_orthonormal_to_exact_norm() {
        let f = mono(vec![2, 1], CRat::from_ratio(3, 7)).add(&mono(vec![0, 4], CRat::i()));
        let sum: f64 = to_orthonormal(&f).values().map(|c| c.norm_sqr()).sum();
        assert!((sum - norm_sq_gaussian(&f).to_f64()).abs() < 1e-10 * (1.0 + sum));
    }

    #[test]
    fn adjoint_relation_in_orthonormal_coefficients() {
        // (f', g) = sum_k sqrt(k+1) f_{k+1} conj(g_k) over the orthonormal
        // coefficients (one variable).
        let f = mono(vec![3], CRat::from_ratio(2, 5))
            .add(&mono(vec![1], CRat::i()))
            .add(&HoloPoly::one(1));
        let g = mono(vec![2], CRat::from_ratio(-1, 3)).add(&mono(vec![0], CRat::from_int(2)));
        let exact = inner_gaussian(&f.derivative(0), &g).unwrap().to_complex64();
        let fc = to_orthonormal(&f);
        let gc = to_orthonormal(&g);
        let mut series = Complex64::new(0.0, 0.0);
        for k in 0..8u32 {
            let fk1 = fc
                .get(&MultiIndex::new(vec![k + 1]))
                .copied()
                .unwrap_or_default();
            let gk = gc
                .get(&MultiIndex::new(vec![k]))
                .copied()
                .unwrap_or_default();
            series += ((k + 1) as f64).sqrt() * fk1 * gk.conj();
        }
        assert!((exact - series).norm() < 1e-10 * (1.0 + exact.norm()));
    }

    #[test]
    fn kernel_truncation_values() {
        let zero = [Complex64::new(0.0, 0.0)];
        let v = kernel_truncated(&zero, &zero, 7);
        assert!((v.re - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        let one = [Complex64::new(1.0, 0.0)];
        // Partial sum 1 + 1 + 1/2 = 2.5 over pi.
        let v = kernel_truncated(&one, &one, 2);
        assert!((v.re - 2.5 / std::f64::consts::PI).abs() < 1e-14);
        let v = kernel_truncated(&one, &one, 60);
        assert!((v.re - std::f64::consts::E / std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn reproducing_property_on_polynomials() {
        // Finite kernel sums reproduce polynomials exactly up to rounding.
        let f = mono(vec![2], CRat::one());
        let z = [Complex64::new(1.0, 0.0)];
        let v = reproduce(&f, &z);
        assert!((v - f.eval(&z)).norm() < 1e-12);

        let g = HoloPoly::variable(2, 0).mul(&HoloPoly::variable(2, 1));
        let w = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)];
        let v = reproduce(&g, &w);
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn projection_of_mixed_terms() {
        // zbar z^2 projects to 2z (n = 1).
        let m = MixedPolyExact::term(
            MultiIndex::new(vec![2]),
            MultiIndex::new(vec![1]),
            CRat::one(),
        );
        assert_eq!(
            bergman_project_gaussian(&m),
            mono(vec![1], CRat::from_int(2))
        );
        // zbar alone projects to 0.
        let m = MixedPolyExact::term(
            MultiIndex::new(vec![0]),
            MultiIndex::new(vec![1]),
            CRat::one(),
        );
        assert!(bergman_project_gaussian(&m).is_zero());
        // Holomorphic inputs are fixed.
        let m = MixedPolyExact::from_holo(&HoloPoly::variable(2, 0));
        assert_eq!(bergman_project_gaussian(&m), HoloPoly::variable(2, 0));
    }

    #[test]
    fn projection_realizes_the_creation_adjoint() {
        // P(zbar_j f) = df/dz_j, exactly, for a non-trivial f.
        let f = mono(vec![3, 1], CRat::from_ratio(5, 3)).add(&mono(vec![0, 2], CRat::i()));
        for j in 0..2 {
            let zbar_j =
                MixedPolyExact::term(MultiIndex::zero(2), MultiIndex::unit(2, j), CRat::one());
            let lifted = zbar_j.mul(&MixedPolyExact::from_holo(&f));
            assert_eq!(bergman_project_gaussian(&lifted), f.derivative(j));
        }
    }

    #[test]
    fn volterra_primitive_examples() {
        // T(1) = z
        let one = HoloPoly::one(1);
        assert_eq!(volterra_primitive(&one).unwrap(), HoloPoly::variable(1, 0));
        // T(z) = z^2/2 and ||T(phi_1)|| = 1/sqrt(2)
        let z = HoloPoly::variable(1, 0);
        let tz = volterra_primitive(&z).unwrap();
        assert_eq!(tz, mono(vec![2], CRat::from_ratio(1, 2)));
        // ||T z||^2 / ||z||^2 = (1/4 * 2 pi) / pi = 1/2
        let ratio = norm_sq_gaussian(&tz).to_f64() / norm_sq_gaussian(&z).to_f64();
        assert!((ratio - 0.5).abs() < 1e-15);
        // Dimension guard
        assert!(volterra_primitive(&HoloPoly::one(2)).is_err());
    }

    #[test]
    fn volterra_contracts_each_basis_level_exactly() {
        // ||T(z^k)||^2 / ||z^k||^2 = 1/(k+1), exact.
        for k in 0..25u32 {
            let f = mono(vec![k], CRat::one());
            let tf = volterra_primitive(&f).unwrap();
            let lhs = norm_sq_gaussian(&tf);
            let rhs = norm_sq_gaussian(&f)
                .scale_rational(&BigRational::new(BigInt::from(1), BigInt::from(k + 1)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn witness_partial_norms_match_hand_sums() {
        let f = WitnessSeries::new(WitnessKind::F);
        let (norm, image) = f.partial_norms(2);
        assert!((norm - 0.5).abs() < 1e-15);
        assert!((image - 1.0).abs() < 1e-15);

        // Harmonic-number oracle at N = 10^4.
        let (_, image) = f.partial_norms(10_000);
        let oracle: f64 = (1..10_000u32).map(|k| 1.0 / k as f64).sum();
        assert!((image - oracle).abs() < 1e-12);
        assert!(image > 9.7);

        // Basel-sum oracle: G stays bounded by pi^2/6.
        let g = WitnessSeries::new(WitnessKind::G);
        let (norm, _) = g.partial_norms(200_000);
        let basel = std::f64::consts::PI.powi(2) / 6.0;
        assert!(norm < basel);
        assert!(basel - norm < 1e-5);
    }

    #[test]
    fn witness_image_norms_grow_monotonically() {
        let f = WitnessSeries::new(WitnessKind::F);
        let g = WitnessSeries::new(WitnessKind::G);
        let mut prev_f = 0.0;
        let mut prev_g = 0.0;
        for n in (2..2000).step_by(97) {
            let (_, imf) = f.partial_norms(n);
            let (_, img) = g.partial_norms(n);
            assert!(imf > prev_f);
            assert!(img > prev_g);
            prev_f = imf;
            prev_g = img;
        }
    }

    #[test]
    fn pointwise_bound_against_kernel_diagonal() {
        // |f(z)|^2 <= K(z,z) ||f||^2 (Cauchy-Schwarz against the kernel).
        let f = mono(vec![2, 1], CRat::from_ratio(2, 3))
            .add(&mono(vec![1, 0], CRat::i()))
            .add(&HoloPoly::one(2));
        let pts = [
            [Complex64::new(0.3, -0.4), Complex64::new(1.0, 0.25)],
            [Complex64::new(-1.1, 0.7), Complex64::new(0.0, -2.0)],
        ];
        let norm = norm_sq_gaussian(&f).to_f64();
        for z in &pts {
            let lhs = f.eval(z).norm_sqr();
            assert!(lhs <= kernel_diagonal(z) * norm * (1.0 + 1e-12));
        }
    }
}
