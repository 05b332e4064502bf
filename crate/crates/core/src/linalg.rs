//! Exact dense linear algebra over the Gaussian rationals.
//!
//! Small-matrix Gaussian elimination used for brute-force kernel bases and
//! for the exact block solves of the homogeneous Galerkin path. Pivots are
//! chosen as the first nonzero entry in the column; everything stays exact.

use crate::scalar::CRat;

/// Row-reduce in place; returns the pivot column for each pivot row.
#[allow(clippy::needless_range_loop)] // two rows of `mat` are live at once
fn row_reduce(mat: &mut [Vec<CRat>]) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(src) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, src);
        let inv = mat[row][col].inv();
        for c in col..cols {
            mat[row][c] = &mat[row][c] * &inv;
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..cols {
                    let delta = &factor * &mat[row][c];
                    mat[r][c] = &mat[r][c] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    pivots
}

/// Basis of the right kernel `{x : A x = 0}` of a dense matrix given by rows.
pub fn nullspace(mut rows: Vec<Vec<CRat>>, cols: usize) -> Vec<Vec<CRat>> {
    debug_assert!(rows.iter().all(|r| r.len() == cols));
    let pivots = row_reduce(&mut rows);
    let mut basis = Vec::new();
    let is_pivot = |c: usize| pivots.binary_search(&c).is_ok();
    for free in 0..cols {
        if is_pivot(free) {
            continue;
        }
        let mut v = vec![CRat::zero(); cols];
        v[free] = CRat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&rows[r][free];
        }
        basis.push(v);
    }
    basis
}

/// Solve `A x = b` for a square nonsingular system; `None` when singular or
/// inconsistent.
pub fn solve(a: &[Vec<CRat>], b: &[CRat]) -> Option<Vec<CRat>> {
    let rows = a.len();
    debug_assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<CRat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    // Inconsistency: a pivot in the augmented column.
    if pivots.last() == Some(&cols) {
        return None;
    }
    if pivots.len() != cols {
        return None; // underdetermined; callers expect unique solutions
    }
    let mut x = vec![CRat::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}
