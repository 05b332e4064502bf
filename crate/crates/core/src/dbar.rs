//! The d-complex on the Gaussian Fock space.
//!
//! `partial` is coefficientwise holomorphic differentiation with wedge,
//! `partial_star` its exact adjoint (multiplication by `z_j` with matching
//! signs), and the complex Laplacian `box = partial_star partial + partial
//! partial_star` acts diagonally on homogeneous degrees with eigenvalue
//! `m + p`. The Neumann operator inverts it exactly as a diagonal rescaling,
//! which yields the canonical solution `u_0 = partial_star(neumann(alpha))`
//! of `partial u = alpha`.

use nalgebra::DMatrix;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::norm_sq_gaussian;
use crate::form::{increasing_tuples, wedge_insert, wedge_remove, PForm};
use crate::linalg;
use crate::multi_index::{binomial, enumerate_degree, MultiIndex};
use crate::poly::HoloPoly;
use crate::scalar::{CRat, ExactScalar};

/// `partial u = sum'_J sum_j (d u_J / d z_j) dz_j ^ dz_J`.
///
/// Rejects top-degree forms; `partial . partial = 0` exactly.
pub fn partial(u: &PForm) -> Result<PForm> {
    let (n, p) = (u.dim(), u.degree());
    if p >= n {
        return Err(Error::FormDegreeOutOfRange {
            min: 0,
            max: n - 1,
            got: p,
        });
    }
    let mut out = PForm::zero(n, p + 1);
    for (key, f) in u.components() {
        for j in 0..n {
            let g = f.derivative(j);
            if g.is_zero() {
                continue;
            }
            if let Some((sign, new_key)) = wedge_insert(j, key) {
                let signed = if sign < 0 { g.neg() } else { g };
                out.add_component(&new_key, signed);
            }
        }
    }
    Ok(out)
}

/// The exact adjoint: `(partial_star u)_K = sum_j (+/-) z_j u_{jK}` with the
/// same transposition signs as [`partial`], so `(partial f, u) = (f,
/// partial_star u)` exactly on polynomial forms.
pub fn partial_star(u: &PForm) -> Result<PForm> {
    let (n, p) = (u.dim(), u.degree());
    if p == 0 {
        return Err(Error::FormDegreeOutOfRange {
            min: 1,
            max: n,
            got: 0,
        });
    }
    let mut out = PForm::zero(n, p - 1);
    for (key, f) in u.components() {
        for t in 0..key.len() {
            let (sign, j, rest) = wedge_remove(key, t);
            let mut g = f.mul_monomial(&MultiIndex::unit(n, j));
            if sign < 0 {
                g = g.neg();
            }
            out.add_component(&rest, g);
        }
    }
    Ok(out)
}

/// The complex Laplacian `box_p = partial_star partial + partial partial_star`
/// (with the vanishing conventions at `p = 0` and `p = n`).
///
/// Computes both the composition and the closed form
/// `sum_k z_k d u_J / d z_k + p u_J` per component and asserts they agree
/// exactly before returning.
pub fn box_laplacian(u: &PForm) -> PForm {
    let (n, p) = (u.dim(), u.degree());
    // Closed form: Euler operator plus p on every component.
    let closed = u.map_components(|f| {
        let mut acc = f.scale(&CRat::from_int(p as i64));
        for k in 0..n {
            acc = acc.add(&f.derivative(k).mul_monomial(&MultiIndex::unit(n, k)));
        }
        acc
    });
    // Composition path.
    let mut composed = PForm::zero(n, p);
    if p < n {
        composed = composed.add(&partial_star(&partial(u).unwrap()).unwrap());
    }
    if p > 0 {
        composed = composed.add(&partial(&partial_star(u).unwrap()).unwrap());
    }
    assert_eq!(
        closed, composed,
        "closed-form and composed Laplacians disagree"
    );
    closed
}

/// One spectrum row: the eigenvalue `m + p` and its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub eigenvalue: u32,
    pub multiplicity: u64,
}

/// The spectrum of `box_p` through degree `m_max`: eigenvalue `m + p` with
/// multiplicity `C(n+m-1, n-1) * C(n, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub n: usize,
    pub p: usize,
    pub rows: Vec<SpectrumRow>,
}

pub fn spectrum_table(n: usize, p: usize, m_max: u32) -> SpectrumTable {
    assert!(n >= 1 && p <= n);
    let form_mult = binomial(n as u64, p as u64);
    let rows = (0..=m_max)
        .map(|m| SpectrumRow {
            eigenvalue: m + p as u32,
            multiplicity: binomial(n as u64 + m as u64 - 1, n as u64 - 1) * form_mult,
        })
        .collect();
    SpectrumTable { n, p, rows }
}

impl SpectrumTable {
    /// Eigenvalues with multiplicity, ascending (the finite-section list).
    pub fn eigenvalue_list(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for row in &self.rows {
            out.extend(std::iter::repeat_n(
                row.eigenvalue,
                row.multiplicity as usize,
            ));
        }
        out
    }
}

/// Ordered orthonormal basis labels of the degree-truncated space of
/// (p,0)-forms: degree-major, then component tuple, then canonical monomial
/// order.
pub fn form_basis(n: usize, p: usize, max_deg: u32) -> Vec<(Vec<usize>, MultiIndex)> {
    let tuples = increasing_tuples(n, p);
    let mut out = Vec::new();
    for m in 0..=max_deg {
        for key in &tuples {
            for alpha in enumerate_degree(n, m) {
                out.push((key.clone(), alpha));
            }
        }
    }
    out
}

/// The finite section of `box_p` over the orthonormal basis of forms with
/// polynomial degree at most `max_deg`.
pub fn assemble_box_matrix(n: usize, p: usize, max_deg: u32) -> DMatrix<f64> {
    assert!(n >= 1 && p <= n);
    let basis = form_basis(n, p, max_deg);
    let dim = basis.len();
    let norms: Vec<f64> = basis
        .iter()
        .map(|(_, alpha)| crate::fock::monomial_norm_sq(alpha).to_f64().sqrt())
        .collect();
    let mut mat = DMatrix::<f64>::zeros(dim, dim);
    for (col, (key, alpha)) in basis.iter().enumerate() {
        let mut e = PForm::zero(n, p);
        e.add_component(key, HoloPoly::monomial(alpha.clone(), CRat::one()));
        let image = box_laplacian(&e);
        for (row, (key2, beta)) in basis.iter().enumerate() {
            let Some(f) = image.component(key2) else {
                continue;
            };
            let c = f.coeff(beta);
            if c.is_zero() {
                continue;
            }
            // <box e_col, e_row> over the orthonormal normalization.
            let ip = ExactScalar::new(c, 0).mul(&crate::fock::monomial_norm_sq(beta));
            mat[(row, col)] = ip.to_f64() / (norms[row] * norms[col]);
        }
    }
    mat
}

/// Numeric eigenvalues of the assembled finite section, ascending.
pub fn box_eigenvalues(n: usize, p: usize, max_deg: u32) -> Vec<f64> {
    let mat = assemble_box_matrix(n, p, max_deg);
    let eig = nalgebra::linalg::SymmetricEigen::new(mat);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// The Neumann operator: the exact inverse of `box_p` for `p >= 1`, scaling
/// the degree-m homogeneous part of every component by `1/(m+p)`.
///
/// Satisfies `||neumann(u)|| <= (1/p) ||u||` exactly.
pub fn neumann(u: &PForm) -> Result<PForm> {
    let p = u.degree();
    if p == 0 {
        return Err(Error::ZeroEigenvalue);
    }
    Ok(u.map_components(|f| {
        let mut acc = HoloPoly::zero(f.dim());
        for (m, part) in f.homogeneous_split() {
            let factor = BigRational::new(1.into(), (m as u64 + p as u64).into());
            acc = acc.add(&part.scale(&CRat::real(factor)));
        }
        acc
    }))
}

/// Canonical solution of `partial u = alpha`: `u_0 = partial_star(neumann(alpha))`.
///
/// Requires `alpha` to be exactly closed (vacuous at top degree); the
/// solution is orthogonal to `ker partial` and satisfies
/// `||u_0|| <= p^{-1/2} ||alpha||`.
pub fn solve_partial(alpha: &PForm) -> Result<PForm> {
    let (n, p) = (alpha.dim(), alpha.degree());
    if p == 0 {
        return Err(Error::FormDegreeOutOfRange {
            min: 1,
            max: n,
            got: 0,
        });
    }
    if p < n {
        let residual = partial(alpha)?;
        if !residual.is_zero() {
            return Err(Error::NotClosed {
                residual: residual.to_string(),
                residual_norm_sq: residual.norm_sq().to_f64(),
            });
        }
    }
    partial_star(&neumann(alpha)?)
}

/// Squared graph norm of a 0-form: `||f||^2 + sum_k ||df/dz_k||^2`, exact.
/// On the basis monomial `z^alpha` this equals `(1 + |alpha|) ||z^alpha||^2`.
pub fn graph_norm_sq(f: &HoloPoly) -> ExactScalar {
    let mut acc = norm_sq_gaussian(f);
    for k in 0..f.dim() {
        acc = acc.add(&norm_sq_gaussian(&f.derivative(k)));
    }
    acc
}

/// Brute-force basis of `ker partial` on (p,0)-forms of polynomial degree at
/// most `max_deg`, via an exact nullspace computation. For `p = 0` the kernel
/// is the constants.
pub fn kernel_basis_partial(n: usize, p: usize, max_deg: u32) -> Vec<PForm> {
    if p == 0 {
        return vec![PForm::scalar(HoloPoly::one(n))];
    }
    if p == n {
        // partial vanishes identically at top degree.
        return form_basis(n, p, max_deg)
            .into_iter()
            .map(|(key, alpha)| {
                let mut form = PForm::zero(n, p);
                form.add_component(&key, HoloPoly::monomial(alpha, CRat::one()));
                form
            })
            .collect();
    }
    type Coord = (Vec<usize>, MultiIndex);
    let basis = form_basis(n, p, max_deg);
    let mut coord_index: BTreeMap<Coord, usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(Coord, CRat)>> = Vec::new();
    for (key, alpha) in &basis {
        let mut e = PForm::zero(n, p);
        e.add_component(key, HoloPoly::monomial(alpha.clone(), CRat::one()));
        let image = partial(&e).unwrap();
        let mut col = Vec::new();
        for (key2, poly) in image.components() {
            for (beta, c) in poly.terms() {
                let coord = (key2.clone(), beta.clone());
                let next = coord_index.len();
                coord_index.entry(coord.clone()).or_insert(next);
                col.push((coord, c.clone()));
            }
        }
        columns.push(col);
    }
    let mut rows = vec![vec![CRat::zero(); basis.len()]; coord_index.len()];
    for (col, entries) in columns.iter().enumerate() {
        for (coord, c) in entries {
            rows[coord_index[coord]][col] = c.clone();
        }
    }
    linalg::nullspace(rows, basis.len())
        .into_iter()
        .map(|v| {
            let mut form = PForm::zero(n, p);
            for (k, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    let (key, alpha) = &basis[k];
                    form.add_component(key, HoloPoly::monomial(alpha.clone(), c));
                }
            }
            form
        })
        .collect()
}
