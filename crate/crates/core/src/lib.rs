//! Exact operator calculus for the d-complex on the Fock space
//! `A^2(C^n, e^{-|z|^2})`.
//!
//! The crate provides, over exact Gaussian-rational arithmetic with the power
//! of pi carried symbolically:
//!
//! - graded multi-index combinatorics and sparse polynomial arithmetic
//!   ([`multi_index`], [`poly`]);
//! - Gaussian inner products, the Bergman kernel and projection, the Volterra
//!   primitive and the ladder-operator unboundedness witnesses ([`fock`]);
//! - the Weyl algebra of normal-ordered polynomial differential operators
//!   with an operator-expression grammar ([`weyl`]);
//! - the d-complex on (p,0)-forms: d, its adjoint, the complex Laplacian and
//!   its spectrum, the diagonal Neumann inverse and canonical solutions
//!   ([`form`], [`dbar`]);
//! - radial polynomial weights with exact Gamma moments, weighted Bergman
//!   projections and the Kohn-Morrey identity with its torsion term
//!   ([`weighted`]);
//! - general constant-coefficient differential complexes `D`, commutator
//!   estimates and Galerkin Neumann solvers ([`general_d`]).

pub mod dbar;
pub mod error;
pub mod fock;
pub mod form;
pub mod general_d;
pub mod json;
pub mod linalg;
pub mod multi_index;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod weighted;
pub mod weyl;

pub use error::{Error, Result};
pub use form::{Form, PForm, PForm64};
pub use multi_index::MultiIndex;
pub use poly::{HoloPoly, HoloPoly64, MixedPoly64, MixedPolyExact, Poly};
pub use scalar::{CRat, ExactScalar};
pub use weyl::WeylOperator;
