//! Link homology over characteristic-2 Frobenius systems.
//!
//! The crate computes the homology of cube-of-resolutions complexes attached
//! to planar link diagrams, with coefficients in a family of rank-two
//! Frobenius systems over GF(2^k) polynomial and Laurent rings. Three
//! computational tiers cover the coefficient domains: Gaussian elimination
//! over fields, Smith normal form over univariate (Laurent) polynomial
//! rings, and module Groebner bases over GF(2)[h,t]. A filtration spectral
//! sequence engine and a verification harness (invariance families, skein
//! triangles, Kuenneth, universal-coefficient consistency) sit on top.

pub mod complex;
pub mod consts;
pub mod diagram;
pub mod expr;
pub mod field;
pub mod frob;
pub mod hom;
pub mod homology;
pub mod ring;
pub mod matrix;
pub mod rng;
pub mod table;

pub use field::FieldElem;
pub use hom::RingHom;
pub use ring::{LaurentPoly, Monomial, Ring, RingError, VarSpec};
