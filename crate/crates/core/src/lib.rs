//! Exact arithmetic for a depth-zero Hecke algebra attached to a
//! principal-series block of `SL8`.
//!
//! The crate models the tower of local fields `F ⊂ E2, E4` by truncated
//! Laurent series over `F_q`, the group `G⁰(F) = (GL2(E2) × E4^×) ∩ SL8(F)`
//! and its compact subgroups, the extended affine Weyl group `W(ρ_{M⁰})`, and
//! the twisted group algebra `C[W(ρ_{M⁰}), μ]`, and machine-checks the
//! identities that make its 2-cocycle non-trivial.

pub mod algebra;
pub mod error;
pub mod gaussian;
pub mod generic;
pub mod groupmodel;
pub mod hecke;
pub mod hnf;
pub mod residue;
pub mod tower;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use gaussian::Gaussian;
pub use groupmodel::{GroupElem, SubgroupVariant, TorusElem};
pub use residue::{ResidueElem, ResidueField, UnitI};
pub use tower::{FieldTag, LaurentElem, Tower, TowerRef, Valuation};
pub use weyl::{Gen, WeylElem, Window};

/// Exact carrier for every complex quantity: `Z[i]` with arbitrary precision.
pub type HeckeCoeff = Gaussian<num_bigint::BigInt>;

/// Machine-word Gaussian integers, for small tables and tests.
pub type SmallGaussian = Gaussian<i64>;

/// Integer lattices in `Z³` with machine-word entries.
pub type IntLattice = hnf::Lattice<i64>;
