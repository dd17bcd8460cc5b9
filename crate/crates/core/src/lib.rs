//! Exact-arithmetic cohomology of flat mapping tori, their Z2-orbifold
//! resolutions, and formality certificates.
//!
//! The crate computes, from lattice and diffeomorphism data alone: Betti
//! numbers, integral H1 with torsion, fixed loci of affine involutions,
//! cup-product structure constants of resolved orbifolds, first Pontryagin
//! classes and their pairings, the quadratic form on H2, signed intersection
//! and linking numbers, and formality certificates (minimal-polynomial
//! eigenvalue obstruction, Bianchi-Massey tensor, triple Massey products).

pub mod algebra;
pub mod catalog;
pub mod formality;
pub mod forms;
pub mod intersect;
pub mod linalg;
pub mod mtc;
pub mod report;
pub mod scalar;
pub mod torus;
