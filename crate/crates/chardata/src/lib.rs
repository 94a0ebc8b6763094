//! Combinatorial models of characteristic data for locally standard torus
//! actions on stratified spaces.
//!
//! The building blocks are saturated sublattices of `Z^m` (standing in for
//! subtori of the compact torus `T^m`) and finite stratified posets (standing
//! in for the face category of a compact stratified orbit space). On top of
//! those, [`CharData`] bundles an orbit-space poset with an order-reversing
//! lattice assignment and a Chern-class descriptor, and [`iso::decide`]
//! settles whether two such data sets are (weakly) isomorphic, which by the
//! classification of these actions settles equivariant homeomorphism of the
//! underlying spaces.
//!
//! Front ends convert complete rational fans ([`fan`]) and labeled convex
//! polytopes ([`polytope`]) into characteristic data.

pub mod data;
pub mod fan;
pub mod gen;
pub mod iso;
pub mod lattice;
pub mod polytope;
pub mod poset;

pub use data::{CharData, ChernClass, InspectReport, ValidationReport};
pub use iso::{decide, fingerprint, verify_witness, DecideOptions, IsoWitness, Mode, Verdict};
pub use lattice::{GeneratorSet, Int, IntVec, QuotientOrder, SaturatedLattice, UnimodularMap};
pub use poset::{PosetIso, StratPoset, Stratum};
